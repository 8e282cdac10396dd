//! The bundled benchmark programs and the statuses expected for them.

use crate::pipeline::Status;
use crate::search::Strategy;

pub const HERON: &str = include_str!("../benchmarks/heron.fps");
pub const OPTIMIZED_HERON: &str = include_str!("../benchmarks/optimized_heron.fps");
pub const SLOPE: &str = include_str!("../benchmarks/slope.fps");
pub const POLYNOMIAL: &str = include_str!("../benchmarks/polynomial.fps");

/// Source of a bundled program by name.
pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "heron" => Some(HERON),
        "optimized_heron" => Some(OPTIMIZED_HERON),
        "slope" => Some(SLOPE),
        "polynomial" => Some(POLYNOMIAL),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    /// Some input reaches the interval.
    Reachable,
    /// No input reaches it.
    Unreachable,
}

/// One row of the benchmark table: a program, which annotation to target,
/// and the known answer.
#[derive(Debug, Clone, Copy)]
pub struct Case {
    pub program: &'static str,
    pub condition: &'static str,
    pub suspect: u32,
    pub tolerance: &'static str,
    pub expected: Expected,
    /// Whether bisection is known to finish on it within the usual budget.
    pub std_decides: bool,
    /// Whether the incomplete 3-singleton strategy is known to find it.
    pub fp3s_finds: bool,
}

#[rustfmt::skip]
pub const CASES: &[Case] = &[
    Case { program: "heron", condition: "area < 1e-5", suspect: 0, tolerance: "1e-5", expected: Expected::Reachable, std_decides: false, fp3s_finds: false },
    Case { program: "heron", condition: "area > 156.25 + 1e-5", suspect: 1, tolerance: "1e-5", expected: Expected::Reachable, std_decides: true, fp3s_finds: false },
    Case { program: "heron", condition: "area > 156.25 + 1e-3", suspect: 2, tolerance: "1e-3", expected: Expected::Unreachable, std_decides: false, fp3s_finds: false },
    Case { program: "optimized_heron", condition: "area < 1e-5", suspect: 0, tolerance: "1e-5", expected: Expected::Reachable, std_decides: false, fp3s_finds: false },
    Case { program: "optimized_heron", condition: "area > 156.25 + 1e-5", suspect: 1, tolerance: "1e-5", expected: Expected::Unreachable, std_decides: true, fp3s_finds: false },
    Case { program: "slope", condition: "dh < 26 - 1", suspect: 0, tolerance: "1", expected: Expected::Reachable, std_decides: true, fp3s_finds: true },
    Case { program: "slope", condition: "dh > 26 + 1", suspect: 1, tolerance: "1", expected: Expected::Reachable, std_decides: true, fp3s_finds: true },
    Case { program: "slope", condition: "dh < 26 - 10", suspect: 2, tolerance: "10", expected: Expected::Unreachable, std_decides: true, fp3s_finds: false },
    Case { program: "slope", condition: "dh > 26 + 10", suspect: 3, tolerance: "10", expected: Expected::Unreachable, std_decides: true, fp3s_finds: false },
    Case { program: "polynomial", condition: "r < 1e9 + 0.0099999904 - 1e-3", suspect: 0, tolerance: "1e-3", expected: Expected::Reachable, std_decides: true, fp3s_finds: true },
];

/// Benchmarks whose sources are not available; listed so that the table
/// shows them.
pub const PENDING: &[(&str, &str)] = &[("simple_interpolator", "res < -1e-5"), ("simple_square", "S > 1.453125")];

impl Case {
    pub fn source(&self) -> &'static str {
        source(self.program).expect("cases name bundled programs")
    }

    /// Whether `strategy` is known to reach a definite answer on this case.
    pub fn is_decided_by(&self, strategy: Strategy) -> bool {
        match strategy {
            Strategy::Std => self.std_decides,
            Strategy::Fpc => true,
            Strategy::Fp3s => self.fp3s_finds,
        }
    }

    /// Whether `status` from `strategy` agrees with the known answer. A
    /// limit hit is tolerated only where the strategy is not known to
    /// finish.
    pub fn matches(&self, strategy: Strategy, status: &Status) -> bool {
        match (strategy, status) {
            (_, Status::Unknown(_)) => !self.is_decided_by(strategy),
            (Strategy::Fp3s, Status::Sat(_)) => self.fp3s_finds,
            (Strategy::Fp3s, Status::NotFound) => !self.fp3s_finds,
            (Strategy::Fp3s, Status::Unsat) => false,
            (_, Status::Sat(_)) => self.expected == Expected::Reachable,
            (_, Status::Unsat) => self.expected == Expected::Unreachable,
            (_, Status::NotFound) => false,
        }
    }
}
