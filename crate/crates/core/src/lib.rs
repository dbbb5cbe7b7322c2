//! Symplectic surfaces in flat C² as graphs: the Kähler angle, the
//! functional `L = ∫ sec α dμ`, its Euler–Lagrange operator, curvature
//! identities and the gradient flow of `L`.

pub mod ambient;
pub mod curvature;
pub mod el;
pub mod error;
pub mod flow;
pub mod functional;
pub mod jet;
pub mod pointwise;
pub mod presets;
pub mod surface;

pub use ambient::{adapted_frame, apply_j, omega, AdaptedFrame, AmbientVector};
pub use error::{GeomError, Result};
pub use jet::{induced_metric, kahler_angle, FirstJet, Metric, SecondJet};
pub use pointwise::PointGeometry;
pub use surface::{DomainMode, GraphSurface, Node};
