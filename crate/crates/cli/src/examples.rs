//! Built-in surfaces, addressable as `example:<name>`.

use std::sync::OnceLock;

use brauer4_core::brauer::ClassTag;
use brauer4_core::quadform::{GeneralSurface, RationalPoint, SubfamilySurface};

use crate::input::Surface;

/// What the full pipeline must find on an example.
#[derive(Debug, Clone)]
pub enum Expectation {
    /// Locally soluble everywhere, obstructed by the class, no point of
    /// height below the bound.
    Obstructed { by: ClassTag, a13_image_half: bool, empty_below: Option<u64> },
    /// No obstruction, and the point is found by search at the bound.
    Unobstructed { point: RationalPoint, height: u64 },
    /// Locally soluble everywhere, order-4 test not certified.
    LocallySolubleNotCertified,
}

#[derive(Debug, Clone)]
pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub surface: Surface,
    pub expect: Expectation,
}

fn build() -> Vec<Example> {
    let pt = |c| RationalPoint::from_i64(c).expect("primitive point");
    vec![
        Example {
            name: "Y_13_2_6",
            description: "Y family, p = 13, a = 2, b = 6",
            surface: Surface::Subfamily(SubfamilySurface::new(13, 2, -13, 1, -6, 1, 2)),
            expect: Expectation::Obstructed { by: ClassTag::A, a13_image_half: true, empty_below: Some(200) },
        },
        Example {
            name: "Y_13_1_12",
            description: "Y family, p = 13, a = 1, b = 12",
            surface: Surface::Subfamily(SubfamilySurface::new(13, 1, -13, 1, -12, 1, 2)),
            expect: Expectation::Unobstructed { point: pt([1, 0, 0, 0, 1]), height: 1 },
        },
        Example {
            name: "Y_13_12_1",
            description: "Y family, p = 13, a = 12, b = 1",
            surface: Surface::Subfamily(SubfamilySurface::new(13, 12, -13, 1, -1, 1, 2)),
            expect: Expectation::Unobstructed { point: pt([1, -3, 2, 7, 16]), height: 16 },
        },
        Example {
            name: "S_13_153_179",
            description: "S family, p = 13, a = 153, b = 179",
            surface: Surface::Subfamily(SubfamilySurface::new(13, 1, 1, 153, 179, 1, 1)),
            expect: Expectation::Obstructed { by: ClassTag::B, a13_image_half: false, empty_below: None },
        },
        Example {
            name: "bsd",
            description: "x^2 - 5y^2 = uv, x^2 - 5z^2 = (u + v)(u + 2v)",
            surface: Surface::General(GeneralSurface::bsd_example()),
            expect: Expectation::LocallySolubleNotCertified,
        },
    ]
}

pub fn all() -> &'static [Example] {
    static CELL: OnceLock<Vec<Example>> = OnceLock::new();
    CELL.get_or_init(build)
}

pub fn by_name(name: &str) -> Option<&'static Example> {
    all().iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

pub fn names() -> String {
    all().iter().map(|e| e.name).collect::<Vec<_>>().join(", ")
}
