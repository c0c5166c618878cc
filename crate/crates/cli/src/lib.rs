//! Library side of the `ofdm-energy` command: single solves, tradeoff
//! sweeps, the acceptance criteria and the independent reference
//! computations they compare against.

pub mod accept;
pub mod oracles;
pub mod output;
pub mod solve;
pub mod sweep;
