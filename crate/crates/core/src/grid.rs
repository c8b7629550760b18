//! Nonuniform compartment grid and the fixed-charge profile.
//!
//! Positions are measured from the left membrane/solution interface, so the
//! membrane occupies `0 ≤ ξ ≤ thickness` and the baths lie on either side.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::units::DimensionlessSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    SolutionLeft,
    Membrane,
    SolutionRight,
}

impl Region {
    pub fn is_membrane(self) -> bool {
        self == Region::Membrane
    }

    pub fn label(self) -> &'static str {
        match self {
            Region::SolutionLeft => "solution_left",
            Region::Membrane => "membrane",
            Region::SolutionRight => "solution_right",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompartmentGrid {
    widths: Vec<f64>,
    centers: Vec<f64>,
    regions: Vec<Region>,
}

/// Number of compartments in each width class of one half of the layout.
///
/// A bath is laid out as `coarse, transition, fine` going towards the
/// membrane; the membrane as `fine, transition, core, transition, fine`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCounts {
    pub solution_coarse: usize,
    pub transition: usize,
    /// Fine compartments on each side of an interface.
    pub fine: usize,
    pub membrane_core: usize,
}

impl Default for GridCounts {
    fn default() -> Self {
        Self {
            solution_coarse: 30,
            transition: 10,
            fine: 80,
            membrane_core: 60,
        }
    }
}

const FINE_WIDTH: f64 = 0.05;
const TRANSITION_WIDTH: f64 = 0.6;
const SOLUTION_COARSE_WIDTH: f64 = 3.0;
const MEMBRANE_CORE_WIDTH: f64 = 1.5;

impl CompartmentGrid {
    /// Builds a grid from compartment widths and region labels. Regions must
    /// form one contiguous left bath, membrane, and right bath block, in that
    /// order; the membrane may not be empty.
    pub fn from_widths(widths: Vec<f64>, regions: Vec<Region>) -> Result<Self> {
        if widths.len() != regions.len() {
            return Err(Error::Shape(format!(
                "{} widths but {} region labels",
                widths.len(),
                regions.len()
            )));
        }
        if widths.is_empty() {
            return Err(Error::invalid("widths", "grid needs at least one compartment"));
        }
        if let Some(w) = widths.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("widths", format!("non-positive width {w}")));
        }
        let rank = |r: Region| match r {
            Region::SolutionLeft => 0,
            Region::Membrane => 1,
            Region::SolutionRight => 2,
        };
        if regions.windows(2).any(|p| rank(p[0]) > rank(p[1])) {
            return Err(Error::invalid("regions", "labels must be contiguous blocks"));
        }
        if !regions.contains(&Region::Membrane) {
            return Err(Error::invalid("regions", "grid has no membrane compartments"));
        }
        let left: f64 = widths
            .iter()
            .zip(&regions)
            .filter(|(_, r)| **r == Region::SolutionLeft)
            .map(|(w, _)| w)
            .sum();
        let mut edge = -left;
        let centers = widths
            .iter()
            .map(|w| {
                let c = edge + 0.5 * w;
                edge += w;
                c
            })
            .collect();
        Ok(Self {
            widths,
            centers,
            regions,
        })
    }

    /// Uniform grid, mostly useful for small test problems.
    pub fn uniform(left: usize, membrane: usize, right: usize, width: f64) -> Result<Self> {
        let regions = std::iter::repeat_n(Region::SolutionLeft, left)
            .chain(std::iter::repeat_n(Region::Membrane, membrane))
            .chain(std::iter::repeat_n(Region::SolutionRight, right))
            .collect::<Vec<_>>();
        Self::from_widths(vec![width; regions.len()], regions)
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn left_edge(&self) -> f64 {
        self.centers[0] - 0.5 * self.widths[0]
    }

    pub fn right_edge(&self) -> f64 {
        let n = self.len() - 1;
        self.centers[n] + 0.5 * self.widths[n]
    }

    pub fn total_width(&self) -> f64 {
        self.widths.iter().sum()
    }

    /// Index range of the membrane compartments.
    pub fn membrane_range(&self) -> std::ops::Range<usize> {
        let start = self.regions.iter().position(|r| r.is_membrane()).unwrap();
        let end = self.regions.iter().rposition(|r| r.is_membrane()).unwrap() + 1;
        start..end
    }

    pub fn membrane_thickness(&self) -> f64 {
        self.widths[self.membrane_range()].iter().sum()
    }

    /// Face index (0 = left boundary, N = right boundary) of the
    /// membrane/right-bath interface.
    pub fn membrane_exit_face(&self) -> usize {
        self.membrane_range().end
    }

    /// Compartment containing the midpoint of the membrane.
    pub fn mid_membrane(&self) -> usize {
        let mid = 0.5 * self.membrane_thickness();
        let range = self.membrane_range();
        range
            .clone()
            .find(|&k| self.centers[k] + 0.5 * self.widths[k] >= mid)
            .unwrap_or(range.end - 1)
    }

    /// CSV with columns `k, xi, width, region`; `k` is 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,xi,width,region\n");
        for k in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                k + 1,
                fmt_f64(self.centers[k]),
                fmt_f64(self.widths[k]),
                self.regions[k].label()
            );
        }
        out
    }
}

/// The 480-compartment grid with width classes 3 / 0.6 / 0.05 / 1.5.
///
/// Interfaces sit in the middle of the two 8-wide fine zones (between
/// compartments 120|121 and 360|361), which leaves 4 length units of fine
/// resolution on each side of each interface. The bath blocks are then 100
/// wide and the membrane 110 wide; the listed widths do not add up to the
/// nominal 50-wide membrane, see [`build_scaled_grid`] for a grid that does.
pub fn build_reference_grid() -> CompartmentGrid {
    let mut widths = Vec::with_capacity(480);
    for k in 1..=480usize {
        let w = match k {
            1..=30 | 451..=480 => SOLUTION_COARSE_WIDTH,
            31..=40 | 201..=210 | 271..=280 | 441..=450 => TRANSITION_WIDTH,
            41..=200 | 281..=440 => FINE_WIDTH,
            _ => MEMBRANE_CORE_WIDTH,
        };
        widths.push(w);
    }
    let regions = (1..=480usize)
        .map(|k| match k {
            1..=120 => Region::SolutionLeft,
            121..=360 => Region::Membrane,
            _ => Region::SolutionRight,
        })
        .collect();
    CompartmentGrid::from_widths(widths, regions).expect("static layout is valid")
}

/// Same layout as [`build_reference_grid`], with the coarse classes rescaled so
/// that each bath is exactly `layer_width` and the membrane exactly
/// `membrane_thickness` wide. The fine and transition widths are kept.
pub fn build_scaled_grid(membrane_thickness: f64, layer_width: f64, counts: GridCounts) -> Result<CompartmentGrid> {
    let interface = counts.transition as f64 * TRANSITION_WIDTH + counts.fine as f64 * FINE_WIDTH;
    let coarse = (layer_width - interface) / counts.solution_coarse as f64;
    let core = (membrane_thickness - 2.0 * interface) / counts.membrane_core as f64;
    if counts.solution_coarse == 0 || !(coarse > 0.0) {
        return Err(Error::invalid(
            "layer_width",
            format!("too thin for {interface} units of interface refinement"),
        ));
    }
    if counts.membrane_core == 0 || !(core > 0.0) {
        return Err(Error::invalid(
            "membrane_thickness",
            format!("too thin for {} units of interface refinement", 2.0 * interface),
        ));
    }
    let bath = |widths: &mut Vec<f64>, regions: &mut Vec<Region>, region: Region, towards_membrane: bool| {
        let mut block = Vec::new();
        block.extend(std::iter::repeat_n(coarse, counts.solution_coarse));
        block.extend(std::iter::repeat_n(TRANSITION_WIDTH, counts.transition));
        block.extend(std::iter::repeat_n(FINE_WIDTH, counts.fine));
        if !towards_membrane {
            block.reverse();
        }
        regions.extend(std::iter::repeat_n(region, block.len()));
        widths.extend(block);
    };
    let mut widths = Vec::new();
    let mut regions = Vec::new();
    bath(&mut widths, &mut regions, Region::SolutionLeft, true);
    let mut membrane = Vec::new();
    membrane.extend(std::iter::repeat_n(FINE_WIDTH, counts.fine));
    membrane.extend(std::iter::repeat_n(TRANSITION_WIDTH, counts.transition));
    membrane.extend(std::iter::repeat_n(core, counts.membrane_core));
    membrane.extend(std::iter::repeat_n(TRANSITION_WIDTH, counts.transition));
    membrane.extend(std::iter::repeat_n(FINE_WIDTH, counts.fine));
    regions.extend(std::iter::repeat_n(Region::Membrane, membrane.len()));
    widths.extend(membrane);
    bath(&mut widths, &mut regions, Region::SolutionRight, false);
    CompartmentGrid::from_widths(widths, regions)
}

/// Fixed charge density at `xi`: `X` inside the membrane (closed interval),
/// zero in the baths.
pub fn theta_at(s: &DimensionlessSystem, xi: f64) -> Result<f64> {
    let lower = -s.layer_width;
    let upper = s.membrane_thickness + s.layer_width;
    if !(xi >= lower && xi <= upper) {
        return Err(Error::OutOfDomain {
            position: xi,
            lower,
            upper,
        });
    }
    Ok(if (0.0..=s.membrane_thickness).contains(&xi) {
        s.fixed_charge
    } else {
        0.0
    })
}
