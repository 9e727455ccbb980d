// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Overlapping community detection by symmetric binary matrix factorization.
//!
//! The adjacency matrix (with unit diagonal) is factorized as `U U^T` with a
//! nonnegative, row-stochastic `U` ([`snmf`]). The soft membership is then
//! cut at the single threshold that best reproduces the adjacency as a
//! product of binary matrices ([`sbmf`]), which yields explicit communities,
//! overlapping nodes and outliers. The number of communities is chosen by a
//! partition density that penalizes heavy overlap ([`quality`],
//! [`pipeline`]).

pub mod cover;
pub mod error;
pub mod gml;
pub mod graph;
pub mod metrics;
pub mod numfmt;
pub mod pipeline;
pub mod quality;
pub mod sbmf;
pub mod snmf;
pub mod synth;

pub use cover::{CommunityCover, GroundTruth, HardLabeling};
pub use error::{Error, Result};
pub use graph::{adjacency_unit_diag, AdjacencyMatrix, Graph, LoadReport};
pub use pipeline::{detect, sweep, Detection, RunConfig, SweepReport};
pub use sbmf::BinarizeConfig;
pub use snmf::SoftMembership;
