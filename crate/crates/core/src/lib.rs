//! Link-performance engine for HAPS-assisted mixed RF/FSO multicast relaying.
//!
//! Two decode-and-forward architectures are modelled:
//!
//! * [`ScenarioKind::S1`]: ground → HAPS (RF) → HAPS (FSO) → multicast users (RF),
//!   three time slots.
//! * [`ScenarioKind::S2`]: ground → HAPS (RF) → LEO satellite (FSO uplink) →
//!   HAPS (FSO downlink) → multicast users (RF), four time slots.
//!
//! RF hops follow shadowed-Rician fading, optical hops follow exponentiated-Weibull
//! turbulence with deterministic stratospheric attenuation and optional
//! zero-boresight pointing error. The crate evaluates outage probability, bit
//! error rate, the ergodic-capacity upper bound and energy efficiency in closed
//! form, by quadrature, and by seeded Monte Carlo simulation.
//!
//! ```
//! use rffso_core::prelude::*;
//!
//! let uplink = ShadowedRicianChannel::from_preset(Shadowing::Average, db_to_linear(20.0));
//! let users = vec![ShadowedRicianChannel::from_preset(Shadowing::Heavy, db_to_linear(20.0)); 10];
//! let path = TurbulencePath::horizontal(100e3, 1e-18, 1550e-9);
//! let sigma2 = scintillation_horizontal(&path);
//! let fso = EwChannel::from_scintillation(sigma2, stratospheric_attenuation(1e-5, 100e3), db_to_linear(20.0)).unwrap();
//! let sc = Scenario::s1(uplink, fso, users);
//! let op = outage_probability(&sc, 7.0).unwrap();
//! assert!(op.value > 0.0 && op.value < 1.0);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atmosphere;
pub mod channels;
pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod quad;
pub mod scenario;
pub mod series;
pub mod specfun;
pub mod units;

pub use error::{Error, Result};
pub use scenario::{Hop, Scenario, ScenarioKind};

pub mod prelude {
    pub use crate::atmosphere::{
        fried_parameter, haps_separation, path_loss_db, scintillation_downlink,
        scintillation_horizontal, scintillation_uplink, stratospheric_attenuation, PathLossBudget,
        TurbulencePath,
    };
    pub use crate::channels::{
        ew_fit, EwChannel, EwParams, PointingError, ShadowedRicianChannel, Shadowing,
    };
    pub use crate::error::{Error, Result};
    pub use crate::metrics::{
        asymptotic_op, ber_closed_form, ber_quadrature, diversity_order, energy_efficiency,
        ergodic_capacity_ub, outage_probability, Method, MetricResult, Modulation,
    };
    pub use crate::montecarlo::{mc_ber, mc_capacity, mc_outage, McConfig};
    pub use crate::scenario::{Hop, Scenario, ScenarioKind};
    pub use crate::series::SeriesControl;
    pub use crate::units::{db_to_linear, dbm_to_watts, linear_to_db};
}
