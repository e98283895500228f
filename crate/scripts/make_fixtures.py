"""Build the low-light / reference image pairs used by the test suites.

Reference images are scikit-image sample photographs (public domain / CC0),
downscaled so the long side is at most 320 px. Low-light counterparts are
produced by scaling exposure in linear light and re-encoding to sRGB.
"""
import os

import numpy as np
from PIL import Image
from skimage import data

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "data")
LONG_SIDE = 320

# name -> linear-light exposure factor for the low-light copy
IMAGES = {
    "astronaut": 0.10,
    "chelsea": 0.12,
    "coffee": 0.08,
    "rocket": 0.10,
    "hubble_deep_field": 0.30,
    "immunohistochemistry": 0.09,
    "camera": 0.07,
    "moon": 0.10,
    "coins": 0.11,
    "brick": 0.06,
    "grass": 0.12,
    "gravel": 0.09,
}


def srgb_to_linear(x):
    return np.where(x <= 0.04045, x / 12.92, ((x + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(x):
    return np.where(x <= 0.0031308, 12.92 * x, 1.055 * np.power(x, 1 / 2.4) - 0.055)


def main():
    os.makedirs(os.path.join(OUT, "ref"), exist_ok=True)
    os.makedirs(os.path.join(OUT, "low"), exist_ok=True)
    for name, exposure in IMAGES.items():
        arr = getattr(data, name)()
        if arr.ndim == 2:
            arr = np.stack([arr] * 3, axis=-1)
        img = Image.fromarray(arr[..., :3].astype(np.uint8))
        scale = LONG_SIDE / max(img.size)
        if scale < 1:
            img = img.resize(
                (round(img.size[0] * scale), round(img.size[1] * scale)), Image.LANCZOS
            )
        img.save(os.path.join(OUT, "ref", f"{name}.png"))
        ref = np.asarray(img).astype(np.float64) / 255.0
        low = linear_to_srgb(srgb_to_linear(ref) * exposure)
        low = np.clip(np.round(low * 255.0), 0, 255).astype(np.uint8)
        Image.fromarray(low).save(os.path.join(OUT, "low", f"{name}.png"))
        v = low.max(axis=-1) / 255.0
        print(f"{name:22s} {img.size} mean V low={v.mean():.3f}")


if __name__ == "__main__":
    main()
