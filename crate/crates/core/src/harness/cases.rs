//! Catalog of reference problems: three single-species and three
//! two-species initial data on the unit interval, and two constant initial
//! data on the unit square.

use serde::Serialize;

use crate::setup::{Axis, BoundarySpec, InitialCondition, ProblemSetup, SpeciesSpec};

/// A named problem together with the resolutions used to study it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCase {
    pub name: String,
    pub description: String,
    pub setup: ProblemSetup,
    /// Time at which convergence tables are taken.
    pub t_final: f64,
    /// Steady-state free energy, when known.
    pub expected_energy: Option<f64>,
    pub h_list: Vec<f64>,
    pub h_ref: f64,
}

impl TestCase {
    pub fn dimension(&self) -> usize {
        self.setup.dimension()
    }
}

fn constant(value: f64) -> InitialCondition {
    InitialCondition::Constant { value }
}

fn linear(value: f64, slope_x: f64) -> InitialCondition {
    InitialCondition::Linear { value, slope_x, slope_y: 0.0 }
}

fn species(name: &str, charge: f64, initial: InitialCondition) -> SpeciesSpec {
    SpeciesSpec {
        name: name.into(),
        charge,
        initial,
    }
}

const TABLE1_H: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

fn single_1d(name: &str, description: &str, initial: InitialCondition, h_list: &[f64]) -> TestCase {
    TestCase {
        name: name.into(),
        description: description.into(),
        setup: ProblemSetup {
            extents: vec![0.0, 1.0],
            species: vec![species("c", 1.0, initial)],
            boundary: BoundarySpec::Interval { sigma_a: -1.0, sigma_b: 0.0 },
        },
        t_final: 0.5,
        expected_energy: Some(0.15375),
        h_list: h_list.to_vec(),
        h_ref: 0.003125,
    }
}

fn pair_1d(name: &str, description: &str, cation: InitialCondition, anion: InitialCondition) -> TestCase {
    TestCase {
        name: name.into(),
        description: description.into(),
        setup: ProblemSetup {
            extents: vec![0.0, 1.0],
            species: vec![species("cation", 1.0, cation), species("anion", -1.0, anion)],
            boundary: BoundarySpec::Interval { sigma_a: -1.0, sigma_b: 0.0 },
        },
        t_final: 0.5,
        expected_energy: Some(1.5147),
        h_list: TABLE1_H.to_vec(),
        h_ref: 0.003125,
    }
}

fn square_2d(name: &str, description: &str, c0: f64, boundary: BoundarySpec) -> TestCase {
    TestCase {
        name: name.into(),
        description: description.into(),
        setup: ProblemSetup {
            extents: vec![0.0, 1.0, 0.0, 1.0],
            species: vec![species("c", 1.0, constant(c0))],
            boundary,
        },
        t_final: 0.05,
        expected_energy: None,
        h_list: vec![0.2, 0.1, 0.05, 0.025],
        h_ref: 0.0125,
    }
}

/// The eight reference problems.
pub fn builtin_cases() -> Vec<TestCase> {
    vec![
        single_1d("paper-1d-case1", "c = 1 on [0,1], sigma_a = -1, sigma_b = 0", constant(1.0), &TABLE1_H),
        single_1d("paper-1d-case2", "c = 2 - 2x on [0,1], sigma_a = -1, sigma_b = 0", linear(2.0, -2.0), &TABLE1_H),
        // the step needs an even cell count to carry unit mass, so start at h = 0.1
        single_1d(
            "paper-1d-case3",
            "c = 2 on [0.5,1], 0 elsewhere, sigma_a = -1, sigma_b = 0",
            InitialCondition::Step { at: 0.5, left: 0.0, right: 2.0, axis: Axis::X },
            &[0.1, 0.05, 0.025, 0.0125, 0.00625],
        ),
        pair_1d("paper-1d-pair-case1", "c1 = 2 (q = +1), c2 = 1 (q = -1)", constant(2.0), constant(1.0)),
        pair_1d("paper-1d-pair-case2", "c1 = 4 - 4x (q = +1), c2 = 2x (q = -1)", linear(4.0, -4.0), linear(0.0, 2.0)),
        pair_1d("paper-1d-pair-case3", "c1 = 4x (q = +1), c2 = 2 - 2x (q = -1)", linear(0.0, 4.0), linear(2.0, -2.0)),
        square_2d(
            "paper-2d-case1",
            "c = 4 on the unit square, sigma = -1 on every edge",
            4.0,
            BoundarySpec::Rectangle { left: -1.0, right: -1.0, bottom: -1.0, top: -1.0 },
        ),
        square_2d(
            "paper-2d-case2",
            "c = 2 on the unit square, sigma = -1 on x = 1 and y = 0, 0 elsewhere",
            2.0,
            BoundarySpec::Rectangle { left: 0.0, right: -1.0, bottom: -1.0, top: 0.0 },
        ),
    ]
}

/// Extra problems with known structure, used to sanity-check the harness.
pub fn synthetic_cases() -> Vec<TestCase> {
    let bump = InitialCondition::Cosine { mean: 1.0, amplitude: 0.5, wavenumber: 1.0, x0: 0.0 };
    vec![TestCase {
        name: "neutral-pair-diffusion".into(),
        description: "two identical opposite-charge species with zero sigma: the potential vanishes and both diffuse".into(),
        setup: ProblemSetup {
            extents: vec![0.0, 1.0],
            species: vec![species("plus", 1.0, bump.clone()), species("minus", -1.0, bump)],
            boundary: BoundarySpec::Interval { sigma_a: 0.0, sigma_b: 0.0 },
        },
        t_final: 0.1,
        expected_energy: None,
        h_list: TABLE1_H.to_vec(),
        h_ref: 0.003125,
    }]
}

pub fn find_case(name: &str) -> Option<TestCase> {
    builtin_cases()
        .into_iter()
        .chain(synthetic_cases())
        .find(|c| c.name == name)
}
