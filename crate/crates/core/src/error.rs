use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented range.
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    /// A probability-valued input lies outside `[0, 1]`.
    InvalidProbability {
        name: &'static str,
        value: f64,
    },
    /// The grid does not contain the structure or the packet with the required margin.
    GridTooSmall {
        required_min: f64,
        required_max: f64,
    },
    /// Gaussian tail mass falling outside the grid exceeds the allowed budget.
    Truncation {
        tail_mass: f64,
    },
    /// The tridiagonal system produced a zero pivot.
    SolverFailure {
        index: usize,
    },
    /// Barrier-region probability never stayed below threshold before `max_time`.
    NotSettled {
        max_time: f64,
        barrier_probability: f64,
    },
    /// A hard-wall neighbour received non-negligible density.
    BoundaryContamination {
        time: f64,
        density: f64,
    },
    /// A field passed to the analyzer still carries probability in the barrier region.
    NotSettledInput {
        barrier_probability: f64,
    },
    MismatchedGrid,
    MismatchedTime {
        a: f64,
        b: f64,
    },
    /// A same-side probability came out clearly negative.
    NegativeProbability {
        name: &'static str,
        value: f64,
    },
    NoResonanceFound {
        lo: f64,
        hi: f64,
    },
    NonPositiveEnergy {
        energy: f64,
    },
    OutOfArcsinDomain {
        argument: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value } => write!(f, "invalid parameter {name} = {value}"),
            Error::InvalidProbability { name, value } => write!(f, "{name} = {value} is not a probability"),
            Error::GridTooSmall { required_min, required_max } => {
                write!(f, "grid must cover [{required_min}, {required_max}] nm")
            }
            Error::Truncation { tail_mass } => write!(f, "packet tail mass {tail_mass:e} falls outside the grid"),
            Error::SolverFailure { index } => write!(f, "singular tridiagonal pivot at node {index}"),
            Error::NotSettled { max_time, barrier_probability } => write!(
                f,
                "barrier region not settled by t = {max_time} fs (probability {barrier_probability:e})"
            ),
            Error::BoundaryContamination { time, density } => {
                write!(f, "density {density:e} reached the hard wall at t = {time} fs")
            }
            Error::NotSettledInput { barrier_probability } => {
                write!(f, "field is not settled: barrier probability {barrier_probability:e}")
            }
            Error::MismatchedGrid => f.write_str("fields live on different grids"),
            Error::MismatchedTime { a, b } => write!(f, "fields taken at different times ({a} fs vs {b} fs)"),
            Error::NegativeProbability { name, value } => write!(f, "{name} = {value:e} is negative"),
            Error::NoResonanceFound { lo, hi } => write!(f, "no resonance with T > 0.5 in [{lo}, {hi}] eV"),
            Error::NonPositiveEnergy { energy } => write!(f, "energy {energy} eV must be positive"),
            Error::OutOfArcsinDomain { argument } => write!(f, "arcsin argument {argument} outside [-1, 1]"),
        }
    }
}

#[cfg(any(feature = "std", test))]
impl std::error::Error for Error {}

pub(crate) fn ensure(cond: bool, name: &'static str, value: f64) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
