//! Color conversions, resampling, box filtering and the fast guided filter.

mod box_filter;
mod color;
mod guided;
mod resample;

pub use box_filter::box_filter;
pub use color::{luma_bt601, rgb_to_lab, rgb_to_s, rgb_to_v, srgb_to_lab};
pub use guided::{guided_filter, guided_filter_fast, GuidedFilterParams};
pub use resample::{resize, resize_plane, Resample};
