use std::fmt;

use mprs_milp::{backend, BundledSolver, MilpModel, MilpSolution, MilpSolver, SolveStatus, SolverConfig};

use crate::error::{Error, Result};

/// A solver backend together with the settings every solve uses.
pub struct SolverContext {
    backend: Box<dyn MilpSolver>,
    config: SolverConfig,
}

impl fmt::Debug for SolverContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverContext").field("backend", &self.backend.id()).field("config", &self.config).finish()
    }
}

impl Default for SolverContext {
    fn default() -> Self {
        Self { backend: Box::new(BundledSolver), config: SolverConfig::default() }
    }
}

impl SolverContext {
    /// Resolves the backend named in `config.backend`.
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { backend: backend(&config.backend)?, config })
    }

    pub fn with_backend(backend: Box<dyn MilpSolver>, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { backend, config })
    }

    pub fn backend(&self) -> &dyn MilpSolver {
        self.backend.as_ref()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Solves `model` and insists on a proven optimum.
    pub(crate) fn solve_optimal(&self, model: &MilpModel, context: &'static str) -> Result<MilpSolution> {
        let sol = self.backend.solve(model, &self.config)?;
        match sol.status {
            SolveStatus::Optimal => Ok(sol),
            status => Err(Error::UnexpectedStatus { context, status }),
        }
    }
}
