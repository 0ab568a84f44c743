//! Unit-root testing, Johansen cointegration and VECM estimation for short
//! annual macro series, with a deterministic Monte Carlo engine.

pub mod cointegration;
pub mod linalg;
pub mod linreg;
pub mod mcsim;
pub mod series;
mod tables;
pub mod unitroot;
pub mod vecm;
