//! Text netlist of the network model, and a parser for the same dialect.
//!
//! One element per line, `*` starts a comment, `.end` closes the file:
//!
//! ```text
//! R name n+ n- value                       resistor
//! C name n+ n- value                       capacitor
//! V name n+ n- value|drive                 voltage source, V(n+) - V(n-)
//! I name n+ n- value|drive                 current source, flows n+ -> n- inside
//! G name n+ n- ctrl+ ctrl- gain [offset]   I = gain (V(ctrl+) - V(ctrl-)) + offset
//! F name n+ n- vsrc gain [vsrc gain ..]    I = Σ gain I(vsrc)
//! H name n+ n- vsrc gain [vsrc gain ..]    V = Σ gain I(vsrc)
//! ```
//!
//! Controlled current sources follow the `I` convention. `I(vsrc)` is the
//! current a voltage source delivers out of its `n+` terminal. A `drive` is
//! a signal expression such as `step(5.0)`.
//!
//! Nodes: `c{i}_{k}` and `phi_{k}` for compartment `k` (1-based), and
//! `c{i}_f{f}`, `phi_f{f}` for face `f` (0 = left boundary, N = right
//! boundary). `0` is ground. Migration and charge sources are linearized
//! around the supplied state.

use std::fmt;
use std::str::FromStr;

use crate::drive::DriveSignal;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::grid::CompartmentGrid;
use crate::network::Discretization;
use crate::solver::{DriveMode, StateVector};
use crate::units::DimensionlessSystem;

#[derive(Debug, Clone, PartialEq)]
pub enum SourceValue {
    Dc(f64),
    Drive(DriveSignal),
}

impl fmt::Display for SourceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceValue::Dc(v) => f.write_str(&fmt_f64(*v)),
            SourceValue::Drive(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Resistor {
        name: String,
        nodes: [String; 2],
        value: f64,
    },
    Capacitor {
        name: String,
        nodes: [String; 2],
        value: f64,
    },
    VoltageSource {
        name: String,
        nodes: [String; 2],
        value: SourceValue,
    },
    CurrentSource {
        name: String,
        nodes: [String; 2],
        value: SourceValue,
    },
    Vccs {
        name: String,
        nodes: [String; 2],
        control: [String; 2],
        gain: f64,
        offset: f64,
    },
    Cccs {
        name: String,
        nodes: [String; 2],
        terms: Vec<(String, f64)>,
    },
    Ccvs {
        name: String,
        nodes: [String; 2],
        terms: Vec<(String, f64)>,
    },
}

impl Element {
    pub fn kind(&self) -> char {
        match self {
            Element::Resistor { .. } => 'R',
            Element::Capacitor { .. } => 'C',
            Element::VoltageSource { .. } => 'V',
            Element::CurrentSource { .. } => 'I',
            Element::Vccs { .. } => 'G',
            Element::Cccs { .. } => 'F',
            Element::Ccvs { .. } => 'H',
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Element::Resistor { name, .. }
            | Element::Capacitor { name, .. }
            | Element::VoltageSource { name, .. }
            | Element::CurrentSource { name, .. }
            | Element::Vccs { name, .. }
            | Element::Cccs { name, .. }
            | Element::Ccvs { name, .. } => name,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.kind();
        match self {
            Element::Resistor { name, nodes, value } | Element::Capacitor { name, nodes, value } => {
                write!(f, "{k} {name} {} {} {}", nodes[0], nodes[1], fmt_f64(*value))
            }
            Element::VoltageSource { name, nodes, value } | Element::CurrentSource { name, nodes, value } => {
                write!(f, "{k} {name} {} {} {value}", nodes[0], nodes[1])
            }
            Element::Vccs {
                name,
                nodes,
                control,
                gain,
                offset,
            } => {
                write!(
                    f,
                    "G {name} {} {} {} {} {}",
                    nodes[0],
                    nodes[1],
                    control[0],
                    control[1],
                    fmt_f64(*gain)
                )?;
                if *offset != 0.0 {
                    write!(f, " {}", fmt_f64(*offset))?;
                }
                Ok(())
            }
            Element::Cccs { name, nodes, terms } | Element::Ccvs { name, nodes, terms } => {
                write!(f, "{k} {name} {} {}", nodes[0], nodes[1])?;
                for (src, gain) in terms {
                    write!(f, " {src} {}", fmt_f64(*gain))?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Netlist {
    /// Comment lines without the leading `* `.
    pub comments: Vec<String>,
    pub elements: Vec<Element>,
}

impl Netlist {
    pub fn count(&self, kind: char) -> usize {
        self.elements.iter().filter(|e| e.kind() == kind).count()
    }

    /// Elements of `kind` whose name starts with `prefix`.
    pub fn count_named(&self, kind: char, prefix: &str) -> usize {
        self.elements
            .iter()
            .filter(|e| e.kind() == kind && e.name().starts_with(prefix))
            .count()
    }

    pub fn find(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name() == name)
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comments {
            writeln!(f, "* {c}")?;
        }
        for e in &self.elements {
            writeln!(f, "{e}")?;
        }
        writeln!(f, ".end")
    }
}

impl FromStr for Netlist {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_netlist(text)
    }
}

/// Element counts by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ElementCounts {
    pub resistors: usize,
    pub capacitors: usize,
    pub voltage_sources: usize,
    pub current_sources: usize,
    pub vccs: usize,
    pub cccs: usize,
    pub ccvs: usize,
}

impl ElementCounts {
    pub fn of(net: &Netlist) -> Self {
        Self {
            resistors: net.count('R'),
            capacitors: net.count('C'),
            voltage_sources: net.count('V'),
            current_sources: net.count('I'),
            vccs: net.count('G'),
            cccs: net.count('F'),
            ccvs: net.count('H'),
        }
    }

    /// Counts for `n` compartments and `m` species with two-species charge
    /// sources (one `GJ_p` per compartment).
    pub fn expected(n: usize, m: usize, mode: &DriveMode) -> Self {
        let galvanostatic = matches!(mode, DriveMode::Galvanostatic(_));
        Self {
            // two diffusion halves per species, two medium halves
            resistors: 2 * m * n + 2 * n,
            // one storage capacitor per species and compartment, plus C1
            capacitors: m * n + 1,
            // bath sources on both sides, right ground, and φ_A if driven by potential
            voltage_sources: 2 * m + 1 + usize::from(!galvanostatic),
            current_sources: usize::from(galvanostatic),
            // two migration sources per species, one charge source, plus G_D
            vccs: 2 * m * n + n + usize::from(galvanostatic),
            cccs: 1,
            ccvs: usize::from(!galvanostatic),
        }
    }
}

fn node_c(i: usize, k: usize) -> String {
    format!("c{}_{}", i + 1, k + 1)
}

fn node_cf(i: usize, f: usize) -> String {
    format!("c{}_f{f}", i + 1)
}

fn node_phi(k: usize) -> String {
    format!("phi_{}", k + 1)
}

fn node_phif(f: usize) -> String {
    format!("phi_f{f}")
}

/// Builds the netlist of the network linearized around `state`.
pub fn build_netlist(
    s: &DimensionlessSystem,
    g: &CompartmentGrid,
    state: &StateVector,
    mode: &DriveMode,
) -> Result<Netlist> {
    let disc = Discretization::new(s, g)?;
    let (n, m) = (disc.len(), disc.species());
    state.check_shape(n, m)?;
    let c0 = disc.bath();
    let two_species = m == 2 && s.valences[1] == -s.valences[0];

    let mut net = Netlist {
        comments: vec![
            "ionx network netlist".into(),
            format!("mode {}, drive {}", mode.name(), mode.signal()),
            format!("compartments {n}, species {m}"),
        ],
        elements: Vec::new(),
    };
    let el = &mut net.elements;

    for k in 0..n {
        let half = 0.5 * disc.width(k);
        for i in 0..m {
            let z = disc.valence(i);
            let d = disc.diffusion(i, k);
            let r = disc.diffusion_resistance(i, k);
            // concentration on the faces this compartment touches
            let c_left = if k == 0 {
                c0
            } else {
                disc.face_concentration(
                    i,
                    k - 1,
                    [state.conc[i][k - 1], state.conc[i][k]],
                    [state.phi[k - 1], state.phi[k]],
                )
            };
            let c_right = if k == n - 1 {
                c0
            } else {
                disc.face_concentration(
                    i,
                    k,
                    [state.conc[i][k], state.conc[i][k + 1]],
                    [state.phi[k], state.phi[k + 1]],
                )
            };
            el.push(Element::Resistor {
                name: format!("Rd{}_{}a", i + 1, k + 1),
                nodes: [node_cf(i, k), node_c(i, k)],
                value: r,
            });
            el.push(Element::Resistor {
                name: format!("Rd{}_{}b", i + 1, k + 1),
                nodes: [node_c(i, k), node_cf(i, k + 1)],
                value: r,
            });
            el.push(Element::Capacitor {
                name: format!("Cd{}_{}", i + 1, k + 1),
                nodes: [node_c(i, k), "0".into()],
                value: disc.width(k),
            });
            el.push(Element::Vccs {
                name: format!("GJe{}_{}a", i + 1, k + 1),
                nodes: [node_cf(i, k), node_c(i, k)],
                control: [node_phif(k), node_phi(k)],
                gain: d * z * c_left / half,
                offset: 0.0,
            });
            el.push(Element::Vccs {
                name: format!("GJe{}_{}b", i + 1, k + 1),
                nodes: [node_c(i, k), node_cf(i, k + 1)],
                control: [node_phi(k), node_phif(k + 1)],
                gain: d * z * c_right / half,
                offset: 0.0,
            });
        }
        el.push(Element::Resistor {
            name: format!("Rp_{}a", k + 1),
            nodes: [node_phif(k), node_phi(k)],
            value: disc.medium_resistance(k),
        });
        el.push(Element::Resistor {
            name: format!("Rp_{}b", k + 1),
            nodes: [node_phi(k), node_phif(k + 1)],
            value: disc.medium_resistance(k),
        });
        let width = disc.width(k);
        let theta = disc.theta(k);
        if two_species {
            el.push(Element::Vccs {
                name: format!("GJp_{}", k + 1),
                nodes: [node_phi(k), "0".into()],
                control: [node_c(0, k), node_c(1, k)],
                gain: -width * disc.valence(0),
                offset: width * theta,
            });
        } else {
            // one source per species; the fixed charge rides on the first
            for i in 0..m {
                el.push(Element::Vccs {
                    name: format!("GJp{}_{}", i + 1, k + 1),
                    nodes: [node_phi(k), "0".into()],
                    control: [node_c(i, k), "0".into()],
                    gain: -width * disc.valence(i),
                    offset: if i == 0 { width * theta } else { 0.0 },
                });
            }
        }
    }

    for i in 0..m {
        el.push(Element::VoltageSource {
            name: format!("Vc{}_L", i + 1),
            nodes: [node_cf(i, 0), "0".into()],
            value: SourceValue::Dc(c0),
        });
        el.push(Element::VoltageSource {
            name: format!("Vc{}_R", i + 1),
            nodes: [node_cf(i, n), "0".into()],
            value: SourceValue::Dc(c0),
        });
    }
    el.push(Element::VoltageSource {
        name: "Vphi_R".into(),
        nodes: [node_phif(n), "0".into()],
        value: SourceValue::Dc(0.0),
    });

    // faradaic current Σ z_i J_i at the left boundary
    let faradaic: Vec<(String, f64)> = (0..m).map(|i| (format!("Vc{}_L", i + 1), disc.valence(i))).collect();
    match mode {
        DriveMode::Galvanostatic(signal) => {
            // C1 integrates I - I_f, so its voltage is D at the boundary
            el.push(Element::CurrentSource {
                name: "IA".into(),
                nodes: ["0".into(), "dL".into()],
                value: SourceValue::Drive(signal.clone()),
            });
            el.push(Element::Cccs {
                name: "FIf".into(),
                nodes: ["dL".into(), "0".into()],
                terms: faradaic,
            });
            el.push(Element::Capacitor {
                name: "C1".into(),
                nodes: ["dL".into(), "0".into()],
                value: 1.0,
            });
            el.push(Element::Vccs {
                name: "GD".into(),
                nodes: ["0".into(), node_phif(0)],
                control: ["dL".into(), "0".into()],
                gain: 1.0,
                offset: 0.0,
            });
        }
        DriveMode::Potentiostatic(signal) => {
            // HD copies D at the boundary onto C1; I(HD) is the total current
            el.push(Element::VoltageSource {
                name: "VA".into(),
                nodes: [node_phif(0), "0".into()],
                value: SourceValue::Drive(signal.clone()),
            });
            el.push(Element::Ccvs {
                name: "HD".into(),
                nodes: ["dL".into(), "0".into()],
                terms: vec![("VA".into(), 1.0)],
            });
            el.push(Element::Capacitor {
                name: "C1".into(),
                nodes: ["dL".into(), "0".into()],
                value: 1.0,
            });
            el.push(Element::Cccs {
                name: "FIf".into(),
                nodes: ["0".into(), "dL".into()],
                terms: faradaic,
            });
        }
    }
    Ok(net)
}

/// Netlist text of the network linearized around `state`.
pub fn export_netlist(
    s: &DimensionlessSystem,
    g: &CompartmentGrid,
    state: &StateVector,
    mode: &DriveMode,
) -> Result<String> {
    Ok(build_netlist(s, g, state, mode)?.to_string())
}

pub fn parse_netlist(text: &str) -> Result<Netlist> {
    let mut net = Netlist::default();
    let mut ended = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}: `{line}`", lineno + 1));
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(err("content after .end"));
        }
        if let Some(c) = line.strip_prefix('*') {
            net.comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        if line.eq_ignore_ascii_case(".end") {
            ended = true;
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 4 {
            return Err(err("too few fields"));
        }
        let name = tokens[1].to_string();
        let nodes = [tokens[2].to_string(), tokens[3].to_string()];
        let rest = &tokens[4..];
        let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
        let value_text = || {
            let mut t = line;
            for _ in 0..4 {
                t = t.trim_start();
                t = &t[t.find(char::is_whitespace).unwrap_or(t.len())..];
            }
            t.trim().to_string()
        };
        let source_value = || -> Result<SourceValue> {
            let v = value_text();
            if v.is_empty() {
                return Err(err("missing value"));
            }
            match v.parse::<f64>() {
                Ok(x) => Ok(SourceValue::Dc(x)),
                Err(_) => Ok(SourceValue::Drive(v.parse().map_err(|_| err("bad source value"))?)),
            }
        };
        let terms = || -> Result<Vec<(String, f64)>> {
            if rest.is_empty() || !rest.len().is_multiple_of(2) {
                return Err(err("expected source/gain pairs"));
            }
            rest.chunks(2).map(|p| Ok((p[0].to_string(), num(p[1])?))).collect()
        };
        let element = match tokens[0] {
            "R" | "C" => {
                if rest.len() != 1 {
                    return Err(err("expected one value"));
                }
                let value = num(rest[0])?;
                if tokens[0] == "R" {
                    Element::Resistor { name, nodes, value }
                } else {
                    Element::Capacitor { name, nodes, value }
                }
            }
            "V" => Element::VoltageSource {
                name,
                nodes,
                value: source_value()?,
            },
            "I" => Element::CurrentSource {
                name,
                nodes,
                value: source_value()?,
            },
            "G" => {
                if !(rest.len() == 3 || rest.len() == 4) {
                    return Err(err("expected ctrl+ ctrl- gain [offset]"));
                }
                Element::Vccs {
                    name,
                    nodes,
                    control: [rest[0].to_string(), rest[1].to_string()],
                    gain: num(rest[2])?,
                    offset: rest.get(3).map_or(Ok(0.0), |s| num(s))?,
                }
            }
            "F" => Element::Cccs {
                name,
                nodes,
                terms: terms()?,
            },
            "H" => Element::Ccvs {
                name,
                nodes,
                terms: terms()?,
            },
            _ => return Err(err("unknown element kind")),
        };
        if net.find(element.name()).is_some() {
            return Err(err("duplicate element name"));
        }
        net.elements.push(element);
    }
    if !ended {
        return Err(Error::Parse("missing .end".into()));
    }
    Ok(net)
}
