//! Minimum-link covering trails for the grid {0,1,2}^k, exact verification,
//! an exhaustive small-case search oracle, covering trees, and SVG export.

pub mod clockwise;
pub mod geom;
pub mod grid;
pub mod oracle;
pub mod render;
pub mod trail;
pub mod trees;
