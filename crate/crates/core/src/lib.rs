//! Cross-view guide robot navigation, simulated end to end.
//!
//! A quadruped guide robot navigates with a low-mounted depth camera and an
//! artificial potential field planner, while the person it guides wears a
//! chest-height depth camera that watches for obstacles the robot cannot see
//! (lamps, branches and barriers hanging above the robot's clearance). The
//! wearer's branch can override the planner through a strict-priority
//! arbiter, and a depth-threshold sentinel announces close hazards.
//!
//! Modules map onto the stack:
//!
//! - [`geometry`]: SE(3) transforms and the optical/physical frame conventions
//! - [`world`]: obstacle scenes and the ray-cast depth camera
//! - [`perception`]: pass-through filter, costmap projection and inflation
//! - [`planner`]: potential-field forces and the admittance law
//! - [`human_branch`]: chest-camera hazard detection and reactive commands
//! - [`arbiter`]: priority multiplexing of the two command streams
//! - [`sentinel`]: depth-triggered hazard announcements
//! - [`sim`]: the deterministic closed-loop episode engine
//! - [`harness`]: scenario files, sweeps, trace plots and the CLI
//!
//! ```no_run
//! use crossview_guide::harness::load_scenario;
//! use crossview_guide::sim::{run_episode, Condition};
//!
//! let scenario = load_scenario("canonical").unwrap();
//! let episode = run_episode(&scenario.scene, Condition::CrossView, 7, &scenario.sim).unwrap();
//! println!("{}", episode.report);
//! ```

pub mod arbiter;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod human_branch;
pub mod perception;
pub mod planner;
pub mod sentinel;
pub mod sim;
pub mod world;

pub use error::{Error, Result};
