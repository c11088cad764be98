//! Value of information under changes to a finite decision problem.
//!
//! Beliefs are probability vectors over `n` states. A decision problem's
//! value function is the upper envelope of its actions' payoff vectors;
//! its cells are where each action is optimal. Everything is generic over
//! [`Scalar`]: `f64` runs with tolerances, [`Rational`] runs exactly.

pub mod acquisition;
pub mod compare;
pub mod decision;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod geometry;
pub mod io;
pub mod lp;
pub mod scalar;
pub mod transforms;

pub use acquisition::{
    adversarial_cost, eval_cost, incomparable_pair_construction, is_mpc, is_nonredundant, is_strict_mpc,
    solve_acquisition, synthesize_cost, AcquisitionSolution, PosteriorDistribution, UPSCost,
};
pub use compare::{
    classify_transformation, common_refinement, has_leftovers, is_consequential, is_convex_difference, is_refining,
    is_strictly_refining, is_totally_refining, is_totally_strictly_refining, refines, shift_majorizes,
    TransformationVerdict,
};
pub use decision::{Action, DecisionProblem, MaxAffine, Subdivision};
pub use error::{Error, Result};
pub use geometry::{Belief, Halfspace, Polytope};
pub use scalar::{ArithmeticMode, Rational, Scalar};
