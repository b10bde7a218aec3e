//! JSON interchange: curve files, braid files, network and matrix exports.
//! JSON is the contract; SVG is presentation only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::braid::{GenLetter, Letter, NormalBraid, SkeinElement, Strand, Tangle};
use crate::curve::SpectralCurveSpec;
use crate::error::{Error, Result};
use crate::geom::{TimedPath, C};
use crate::matskein::MatSkein;
use crate::network::{CutTarget, Network, WallEnd};
use crate::poly::{Poly, RationalFn};
use crate::ring::HbarC;

fn c_from(pair: &[f64; 2]) -> C {
    Complex64::new(pair[0], pair[1])
}

fn c_to(z: C) -> [f64; 2] {
    [z.re, z.im]
}

// --- curve input -----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub phi: Vec<PhiEntry>,
    #[serde(default)]
    pub punctures: Vec<[f64; 2]>,
    pub basepoint: [f64; 2],
    pub chart_radius: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PhiEntry {
    pub num: Vec<[f64; 2]>,
    #[serde(default = "default_den")]
    pub den: Vec<[f64; 2]>,
}

fn default_den() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

impl CurveFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("curve file: {e}")))
    }

    pub fn to_spec(&self) -> Result<SpectralCurveSpec> {
        let phis = self
            .phi
            .iter()
            .map(|p| {
                let num = Poly::new(p.num.iter().map(c_from).collect());
                let den = Poly::new(p.den.iter().map(c_from).collect());
                RationalFn::new(num, den)
            })
            .collect::<Result<Vec<_>>>()?;
        SpectralCurveSpec::new(
            self.n,
            phis,
            self.punctures.iter().map(c_from).collect(),
            c_from(&self.basepoint),
            self.chart_radius,
        )
    }
}

// --- braid input -----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct BraidFile {
    pub kappa: usize,
    pub basepoints: Vec<[f64; 2]>,
    /// Generator word: "s1", "s1'" (crossings), "w1@2", "w1@2'" (slot 2 loops
    /// around puncture 1).
    #[serde(default)]
    pub word: Vec<String>,
    /// Raw strands as [t, re, im] samples; used when `word` is empty.
    #[serde(default)]
    pub strands: Vec<Vec<[f64; 3]>>,
    /// Optional explicit crossing list [t, strand, strand, sign] for raw
    /// strands; validated against the combed diagram.
    #[serde(default)]
    pub crossings: Vec<[f64; 4]>,
}

impl BraidFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("braid file: {e}")))
    }

    pub fn basepoints_c(&self) -> Vec<C> {
        self.basepoints.iter().map(c_from).collect()
    }

    pub fn parse_word(&self) -> Result<Vec<GenLetter>> {
        self.word.iter().map(|w| parse_gen_letter(w, self.kappa)).collect()
    }

    pub fn to_tangle(&self, punctures: &[C]) -> Result<Tangle> {
        let q = self.basepoints_c();
        if q.len() != self.kappa {
            return Err(Error::Invalid("kappa does not match the number of basepoints".into()));
        }
        if !self.word.is_empty() {
            let word = self.parse_word()?;
            return crate::braid::synthesize_word(&q, punctures, &word);
        }
        if self.strands.is_empty() {
            return Err(Error::Invalid("braid file needs either a word or raw strands".into()));
        }
        let mut strands = Vec::new();
        for s in &self.strands {
            if s.len() < 2 {
                return Err(Error::NonBraidDiagram("strand with fewer than two samples".into()));
            }
            let pts: Vec<(f64, C)> = s.iter().map(|p| (p[0], Complex64::new(p[1], p[2]))).collect();
            for w in pts.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::NonBraidDiagram("strand samples not increasing in time".into()));
                }
            }
            strands.push(Strand { path: TimedPath::new(pts), start_dec: 0 });
        }
        Ok(Tangle { strands })
    }
}

fn parse_gen_letter(s: &str, kappa: usize) -> Result<GenLetter> {
    let (body, inverse) = match s.strip_suffix('\'') {
        Some(b) => (b, true),
        None => (s, false),
    };
    if let Some(num) = body.strip_prefix('s') {
        let k: usize = num.parse().map_err(|_| Error::Invalid(format!("bad generator {s}")))?;
        if k == 0 || k >= kappa {
            return Err(Error::Invalid(format!("sigma index {k} out of range 1..{}", kappa - 1)));
        }
        return Ok(GenLetter::Sigma { k: k - 1, inverse });
    }
    if let Some(rest) = body.strip_prefix('w') {
        let parts: Vec<&str> = rest.split('@').collect();
        if parts.len() == 2 {
            let w: usize = parts[0].parse().map_err(|_| Error::Invalid(format!("bad generator {s}")))?;
            let slot: usize = parts[1].parse().map_err(|_| Error::Invalid(format!("bad generator {s}")))?;
            if w == 0 || slot == 0 || slot > kappa {
                return Err(Error::Invalid(format!("bad indices in generator {s}")));
            }
            return Ok(GenLetter::Loop { slot: slot - 1, puncture: w - 1, inverse });
        }
    }
    Err(Error::Invalid(format!("unrecognized braid generator {s}")))
}

// --- network output --------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct NetworkJson {
    pub walls: Vec<WallJson>,
    pub joints: Vec<JointJson>,
    pub cuts: Vec<CutJson>,
    pub branch_points: Vec<BranchPointJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WallJson {
    /// Colliding-pair root values at the seed, f-increasing first.
    pub label: [[f64; 2]; 2],
    pub source: String,
    pub end: String,
    pub points: Vec<[f64; 2]>,
    pub f: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JointJson {
    pub z: [f64; 2],
    pub incoming: [usize; 2],
    pub outgoing: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CutJson {
    pub branch_point: usize,
    pub target: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BranchPointJson {
    pub z: [f64; 2],
    pub p: [f64; 2],
    pub colliding_pair: [usize; 2],
    pub local_coeff: [f64; 2],
}

pub fn network_to_json(network: &Network) -> NetworkJson {
    NetworkJson {
        walls: network
            .walls
            .iter()
            .map(|w| WallJson {
                label: [c_to(w.pair_values[1].0), c_to(w.pair_values[1].1)],
                source: match w.source {
                    crate::network::WallSource::BranchPoint(i) => format!("branch_point:{i}"),
                    crate::network::WallSource::Joint(i) => format!("joint:{i}"),
                },
                end: match w.end {
                    WallEnd::ExitChart => "exit_chart".into(),
                    WallEnd::StopAtPuncture(i) => format!("puncture:{i}"),
                    WallEnd::SheetCollision(i) => format!("branch_point:{i}"),
                    WallEnd::MaxArc => "max_arc".into(),
                },
                points: w.points.iter().map(|z| c_to(*z)).collect(),
                f: w.f_values.clone(),
            })
            .collect(),
        joints: network
            .joints
            .iter()
            .map(|j| JointJson { z: c_to(j.z), incoming: [j.incoming.0, j.incoming.1], outgoing: j.outgoing })
            .collect(),
        cuts: network
            .cuts
            .iter()
            .map(|cut| CutJson {
                branch_point: cut.branch_point,
                target: match cut.target {
                    CutTarget::Puncture(i) => format!("puncture:{i}"),
                    CutTarget::Infinity => "infinity".into(),
                },
                points: cut.path.iter().map(|z| c_to(*z)).collect(),
            })
            .collect(),
        branch_points: network
            .branch_points
            .iter()
            .map(|bp| BranchPointJson {
                z: c_to(bp.z),
                p: c_to(bp.p),
                colliding_pair: [bp.colliding_pair.0, bp.colliding_pair.1],
                local_coeff: c_to(bp.local_coeff),
            })
            .collect(),
    }
}

// --- skein / matrix output -------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct CoeffMonomial {
    pub hbar_pow: u32,
    pub c_pow: i32,
    pub int: i64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: Vec<CoeffMonomial>,
    pub perm: Vec<u8>,
    pub starts: Vec<u8>,
    pub ends: Vec<u8>,
    pub words: Vec<Vec<LetterJson>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LetterJson {
    pub marker: u16,
    pub exp: i8,
    pub sheet: u8,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SkeinElementJson {
    pub kappa: usize,
    pub terms: Vec<TermJson>,
}

pub fn coeff_to_json(c: &HbarC) -> Vec<CoeffMonomial> {
    c.iter()
        .map(|((h, cp), v)| CoeffMonomial { hbar_pow: *h, c_pow: *cp, int: *v })
        .collect()
}

fn letter_to_json(l: &Letter) -> LetterJson {
    LetterJson { marker: l.marker, exp: l.exp, sheet: l.dec }
}

fn term_to_json(b: &NormalBraid, c: &HbarC) -> TermJson {
    TermJson {
        coeff: coeff_to_json(c),
        perm: b.perm.clone(),
        starts: b.starts.clone(),
        ends: b.ends.clone(),
        words: b.words.iter().map(|w| w.iter().map(letter_to_json).collect()).collect(),
    }
}

pub fn skein_to_json(el: &SkeinElement) -> SkeinElementJson {
    SkeinElementJson {
        kappa: el.kappa,
        terms: el.terms.iter().map(|(b, c)| term_to_json(b, c)).collect(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatSkeinJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub kappa: usize,
    pub entries: Vec<MatEntryJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatEntryJson {
    pub alpha: Vec<u8>,
    pub beta: Vec<u8>,
    pub value: SkeinElementJson,
}

pub fn matskein_to_json(m: &MatSkein) -> MatSkeinJson {
    MatSkeinJson {
        n: m.n,
        kappa: m.kappa,
        entries: m
            .entries
            .iter()
            .map(|((a, b), v)| MatEntryJson { alpha: a.0.clone(), beta: b.0.clone(), value: skein_to_json(v) })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_curve_file() {
        let text = r#"{
            "N": 2,
            "phi": [ {"num": []}, {"num": [[0.0,0.0],[-1.0,0.0]]} ],
            "punctures": [],
            "basepoint": [0.7, -0.9],
            "chart_radius": 8.0
        }"#;
        let cf = CurveFile::parse(text).unwrap();
        let spec = cf.to_spec().unwrap();
        assert_eq!(spec.n, 2);
        assert!(spec.infinity_is_pole());
    }

    #[test]
    fn parse_braid_word() {
        let text = r#"{
            "kappa": 2,
            "basepoints": [[0.0, -1.0], [1.0, -1.0]],
            "word": ["s1", "s1'", "w1@2"]
        }"#;
        let bf = BraidFile::parse(text).unwrap();
        let word = bf.parse_word().unwrap();
        assert_eq!(word.len(), 3);
        assert_eq!(word[0], GenLetter::Sigma { k: 0, inverse: false });
        assert_eq!(word[1], GenLetter::Sigma { k: 0, inverse: true });
        assert_eq!(word[2], GenLetter::Loop { slot: 1, puncture: 0, inverse: false });
    }
}
