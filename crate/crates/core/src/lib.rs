// Copyright 2026 The rdfvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Version control for RDF datasets built on atomic graphs.

pub mod atomic;
pub mod delta;
pub mod error;
pub mod harness;
pub mod history;
pub mod merge;
pub mod rdf;
pub mod store;
pub mod sync;

pub use error::{Error, Result};
