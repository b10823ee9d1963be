//! Formulations of the ladder-in-a-corridor problem.
//!
//! The corridor has width 1. In the right-angled case its outer walls are
//! the non-positive x-axis and the non-negative y-axis, its inner corner is
//! (−1, 1), and a ladder pose is given by its endpoints (x, y) and (w, z).
//! Angled corridors keep the horizontal arm and turn the second arm by the
//! given tangent.
//!
//! Formulas are written out as text in the formula language and parsed, so
//! products such as `(1+b)*(c-a)` arrive expanded.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::cad::{qe, QeOptions};
use crate::error::{CadError, Result};
use crate::formula::{negate_nnf, parse_formula, Atom, Formula, Relop};
use crate::poly::{ratio, Poly, Rat, VarOrder};

/// Ladder lengths whose configuration spaces differ qualitatively: cannot
/// pass; passes but cannot reverse; reverses only in the corner; reverses
/// anywhere.
pub fn preset_lengths() -> [Rat; 4] {
    [ratio(3, 1), ratio(2, 1), ratio(5, 4), ratio(3, 4)]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Corridor {
    RightAngle,
    /// Second arm along `y = k·x`, `y = k·x + 1`, with `k = tan θ`.
    Obtuse(Rat),
    /// Second arm along `y = −k·x`, `y = −k·(x + 1)`, with `k = tan ψ`.
    Acute(Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Length {
    /// The length is the free variable `r` (`L` for Yang–Zeng).
    Symbolic,
    Value(Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub length: Length,
    pub corridor: Corridor,
}

impl ProblemSpec {
    pub fn right_angle(length: Rat) -> Self {
        ProblemSpec { length: Length::Value(length), corridor: Corridor::RightAngle }
    }

    pub fn symbolic(corridor: Corridor) -> Self {
        ProblemSpec { length: Length::Symbolic, corridor }
    }

    fn validate(&self) -> Result<()> {
        if let Length::Value(r) = &self.length {
            if !r.is_positive() {
                return Err(CadError::Usage("ladder length must be positive".into()));
            }
        }
        match &self.corridor {
            Corridor::Obtuse(k) | Corridor::Acute(k) if !k.is_positive() => {
                Err(CadError::Usage("corridor tangent must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    fn require_right_angle(&self, kind: Kind) -> Result<()> {
        if self.corridor != Corridor::RightAngle {
            return Err(CadError::Usage(format!("{kind} needs a right-angled corridor")));
        }
        Ok(())
    }

    /// Text for r², either a number or `r^2`.
    fn r2(&self) -> String {
        match &self.length {
            Length::Symbolic => "r^2".into(),
            Length::Value(r) => num(&(r * r)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Davenport,
    Wang,
    WangSimplified,
    YangZeng,
    InvalidT,
    ValidFull,
    SingleEndpoint,
    ObtuseInvalid,
    AcuteInvalid,
    ObtuseWang,
    AcuteWang,
}

impl Kind {
    pub const ALL: [Kind; 11] = [
        Kind::Davenport,
        Kind::Wang,
        Kind::WangSimplified,
        Kind::YangZeng,
        Kind::InvalidT,
        Kind::ValidFull,
        Kind::SingleEndpoint,
        Kind::ObtuseInvalid,
        Kind::AcuteInvalid,
        Kind::ObtuseWang,
        Kind::AcuteWang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Davenport => "davenport",
            Kind::Wang => "wang",
            Kind::WangSimplified => "wang_simplified",
            Kind::YangZeng => "yangzeng",
            Kind::InvalidT => "invalid_t",
            Kind::ValidFull => "valid_full",
            Kind::SingleEndpoint => "single_endpoint",
            Kind::ObtuseInvalid => "obtuse_invalid",
            Kind::AcuteInvalid => "acute_invalid",
            Kind::ObtuseWang => "obtuse_wang",
            Kind::AcuteWang => "acute_wang",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = CadError;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CadError::Usage(format!("unknown formulation kind '{s}'")))
    }
}

/// Which conditions the topological simplification of Wang's formulation
/// removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WangVariant {
    Full,
    /// Drops everything about the second inner wall: `d < −1` and the
    /// collinearity equation for `d`. Hitting the outer walls and one inner
    /// wall already forces a hit on the other.
    DropSecondInnerWall,
    /// Drops the sign conditions `c ≥ 1`, `d < −1` on the inner-wall
    /// intersections. Not equivalent: any chord from the negative x-axis to
    /// the positive y-axis then qualifies.
    DropInnerSigns,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Formulation {
    pub kind: Kind,
    pub formula: Formula,
    pub order: VarOrder,
    /// Bound variables, as indices into `order`.
    pub quantified: Vec<usize>,
}

impl Formulation {
    fn parse(kind: Kind, order: &str, text: &str) -> Result<Formulation> {
        let order = VarOrder::parse(order)?;
        let formula = parse_formula(text, &order)?;
        let mut quantified = formula.bound_vars();
        quantified.sort_unstable();
        quantified.dedup();
        Ok(Formulation { kind, formula, order, quantified })
    }

    pub fn text(&self) -> String {
        self.formula.to_text(&self.order)
    }

    /// `vars ... . formula` document accepted by the parser.
    pub fn document(&self) -> String {
        format!("vars {}.\n{}.\n", self.order.names().join(", "), self.text())
    }

    /// The ladder-length equation of the Wang-style formulations, which is
    /// a conjunct of the matrix and so can drive equational-constraint
    /// projection.
    pub fn equational_constraint(&self) -> Option<Poly> {
        if !matches!(self.kind, Kind::Wang | Kind::WangSimplified | Kind::ObtuseWang | Kind::AcuteWang) {
            return None;
        }
        let mut f = &self.formula;
        while let Formula::Quant(_, _, body) = f {
            f = body;
        }
        let Formula::And(parts) = f else { return None };
        parts.iter().find_map(|p| match p {
            Formula::Atom(Atom::Poly { poly, rel: Relop::Eq }) => Some(poly.clone()),
            _ => None,
        })
    }

    /// The same formula over a permutation of the variables.
    pub fn reorder(&self, order: &VarOrder) -> Result<Formulation> {
        let mut a: Vec<&String> = self.order.names().iter().collect();
        let mut b: Vec<&String> = order.names().iter().collect();
        a.sort();
        b.sort();
        if a != b {
            return Err(CadError::Usage(format!(
                "order {} is not a permutation of {}",
                order.names().join(","),
                self.order.names().join(",")
            )));
        }
        let formula = parse_formula(&self.text(), order)?;
        let quantified = self.quantified.iter().map(|&v| order.index_of(self.order.name(v)).unwrap()).collect();
        Ok(Formulation { kind: self.kind, formula, order: order.clone(), quantified })
    }
}

fn num(q: &Rat) -> String {
    format!("({q})")
}

fn lenvar(spec: &ProblemSpec, name: &str) -> String {
    match spec.length {
        Length::Symbolic => format!("{name},"),
        Length::Value(_) => String::new(),
    }
}

/// Generates a formulation with default options (full Wang formulation).
pub fn generate(kind: Kind, spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    match kind {
        Kind::Davenport => gen_davenport(spec),
        Kind::Wang => gen_wang(spec, WangVariant::Full),
        Kind::WangSimplified => gen_wang(spec, WangVariant::DropSecondInnerWall),
        Kind::YangZeng => gen_yangzeng(spec),
        Kind::InvalidT => gen_invalid(spec),
        Kind::ValidFull => gen_valid(spec),
        Kind::SingleEndpoint => gen_single_endpoint(spec),
        Kind::ObtuseInvalid => gen_obtuse_invalid(spec),
        Kind::AcuteInvalid => gen_acute_invalid(spec),
        Kind::ObtuseWang | Kind::AcuteWang => gen_angled_wang(spec),
    }
}

/// The ladder fixed by its endpoints, with the corridor constraints written
/// as sign conditions on the endpoints and on cross products.
pub fn gen_davenport(spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    spec.require_right_angle(Kind::Davenport)?;
    let text = format!(
        "(x-w)^2+(y-z)^2-{r2} = 0 \
         /\\ [y*z >= 0 \\/ x*(y-z)^2+y*(w-x)*(y-z) >= 0] \
         /\\ [(y-1)*(z-1) >= 0 \\/ (x+1)*(y-z)^2+(y-1)*(w-x)*(y-z) >= 0] \
         /\\ [x*w >= 0 \\/ y*(x-w)^2+x*(z-y)*(x-w) >= 0] \
         /\\ [(x+1)*(w+1) >= 0 \\/ (y-1)*(x-w)^2+(x+1)*(z-y)*(x-w) >= 0]",
        r2 = spec.r2()
    );
    Formulation::parse(Kind::Davenport, &format!("{}x,y,w,z", lenvar(spec, "r")), &text)
}

/// The ladder is stuck iff it meets all four walls at once: outer walls at
/// (0, a) and (b, 0), inner walls at (c, 1) and (−1, d).
pub fn gen_wang(spec: &ProblemSpec, variant: WangVariant) -> Result<Formulation> {
    spec.validate()?;
    spec.require_right_angle(Kind::Wang)?;
    let r_pos = match &spec.length {
        Length::Symbolic => "r > 0",
        Length::Value(_) => "TRUE",
    };
    let r2 = spec.r2();
    let (kind, text) = match variant {
        WangVariant::Full => (
            Kind::Wang,
            format!(
                "(E a)(E b)(E c)(E d)[a^2+b^2 = {r2} /\\ {r_pos} \
                 /\\ a >= 0 /\\ b < 0 /\\ c >= 1 /\\ d < -1 \
                 /\\ c-(1+b)*(c-a) = 0 /\\ d-(1-a)*(d-b) = 0]"
            ),
        ),
        WangVariant::DropSecondInnerWall => (
            Kind::WangSimplified,
            format!(
                "(E a)(E b)(E c)[a^2+b^2 = {r2} /\\ {r_pos} \
                 /\\ a >= 0 /\\ b < 0 /\\ c >= 1 \
                 /\\ c-(1+b)*(c-a) = 0]"
            ),
        ),
        WangVariant::DropInnerSigns => (
            Kind::WangSimplified,
            format!(
                "(E a)(E b)(E c)(E d)[a^2+b^2 = {r2} /\\ {r_pos} \
                 /\\ a >= 0 /\\ b < 0 \
                 /\\ c-(1+b)*(c-a) = 0 /\\ d-(1-a)*(d-b) = 0]"
            ),
        ),
    };
    let vars = match variant {
        WangVariant::DropSecondInnerWall => "a,b,c",
        _ => "a,b,c,d",
    };
    Formulation::parse(kind, &format!("{}{vars}", lenvar(spec, "r")), &text)
}

/// A route exists iff the octic is positive for all x.
pub fn gen_yangzeng(spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    spec.require_right_angle(Kind::YangZeng)?;
    let l = match &spec.length {
        Length::Symbolic => "L".to_string(),
        Length::Value(v) => num(v),
    };
    let text = format!("(A x)[4*x^8-4*({l}-3)*x^6-2*(3*{l}-6)*x^4-2*({l}-3)*x^2+1 > 0]");
    Formulation::parse(Kind::YangZeng, &format!("{}x", lenvar(spec, "L")), &text)
}

fn interior(c: &str) -> String {
    match c {
        "x" => "(x+t*(w-x))".into(),
        "y" => "(y+t*(z-y))".into(),
        _ => unreachable!(),
    }
}

/// Poses that are invalid: an endpoint in the forbidden quadrant or beyond
/// an outer wall, or an interior point of the ladder in the forbidden
/// quadrant.
pub fn gen_invalid(spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    spec.require_right_angle(Kind::InvalidT)?;
    let (px, py) = (interior("x"), interior("y"));
    let text = format!(
        "[x < -1 /\\ y > 1] \\/ [w < -1 /\\ z > 1] \\/ [x > 0] \\/ [w > 0] \\/ [y < 0] \\/ [z < 0] \
         \\/ (E t)[0 < t /\\ t < 1 /\\ {px} < -1 /\\ {py} > 1]"
    );
    Formulation::parse(Kind::InvalidT, "x,y,w,z,t", &text)
}

/// The valid configurations, built by eliminating `t` from the invalid
/// region, negating, and conjoining the length equation.
pub fn gen_valid(spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    spec.require_right_angle(Kind::ValidFull)?;
    let invalid = gen_invalid(spec)?;
    let out = qe(&invalid.formula, &invalid.order, &QeOptions::default())?;
    let eliminated = out.formula.to_text(&invalid.order);
    let order = format!("{}x,y,w,z", lenvar(spec, "r"));
    let o = VarOrder::parse(&order)?;
    let qf = parse_formula(&eliminated, &o)?;
    let neg = negate_nnf(&qf)?;
    let length = parse_formula(&format!("(x-w)^2+(y-z)^2 = {}", spec.r2()), &o)?;
    Ok(Formulation { kind: Kind::ValidFull, formula: Formula::and(vec![length, neg]), order: o, quantified: vec![] })
}

/// The valid region projected onto one endpoint: (∃w)(∃z) of the full
/// formulation. Pairs with [`reference_corridor`].
pub fn gen_single_endpoint(spec: &ProblemSpec) -> Result<Formulation> {
    let v = gen_valid(spec)?;
    let (w, z) = (v.order.index_of("w").unwrap(), v.order.index_of("z").unwrap());
    let formula = Formula::exists(w, Formula::exists(z, v.formula));
    Ok(Formulation { kind: Kind::SingleEndpoint, formula, order: v.order, quantified: vec![w, z] })
}

fn tangent(spec: &ProblemSpec, obtuse: bool) -> Result<Rat> {
    match (&spec.corridor, obtuse) {
        (Corridor::Obtuse(k), true) | (Corridor::Acute(k), false) => Ok(k.clone()),
        _ => Err(CadError::Usage(format!(
            "{} formulation needs an {} corridor",
            if obtuse { "obtuse" } else { "acute" },
            if obtuse { "obtuse" } else { "acute" }
        ))),
    }
}

/// Invalid region for the corridor whose second arm has walls
/// `y = k·x` and `y = k·x + 1`.
pub fn gen_obtuse_invalid(spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    let k = num(&tangent(spec, true)?);
    let clauses = |x: &str, y: &str| {
        format!("[{x} < 0 /\\ {y} > 1] \\/ [{y} < 0] \\/ [{x} > 0 /\\ {y} > {k}*{x}+1] \\/ [{y} < {k}*{x}]")
    };
    let (px, py) = (interior("x"), interior("y"));
    let text = format!(
        "{} \\/ {} \\/ (E t)[0 < t /\\ t < 1 /\\ [{}]]",
        clauses("x", "y"),
        clauses("w", "z"),
        clauses(&px, &py)
    );
    Formulation::parse(Kind::ObtuseInvalid, "x,y,w,z,t", &text)
}

/// Invalid region for the corridor whose second arm has walls
/// `y = −k·x` and `y = −k·(x + 1)`. The inner corner is at
/// `x = −(k+1)/k`; `x < −(k+1)/k` is written `k·x + k + 1 < 0`, which is
/// the same condition since `k > 0`.
pub fn gen_acute_invalid(spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    let k = num(&tangent(spec, false)?);
    let clauses = |x: &str, y: &str| {
        format!("[{y} < 0] \\/ [{y} > -{k}*{x}] \\/ [{k}*{x}+{k}+1 < 0 /\\ {y} > 1 /\\ {y} < -{k}*({x}+1)]")
    };
    let (px, py) = (interior("x"), interior("y"));
    let text = format!(
        "{} \\/ {} \\/ (E t)[0 < t /\\ t < 1 /\\ [{}]]",
        clauses("x", "y"),
        clauses("w", "z"),
        clauses(&px, &py)
    );
    Formulation::parse(Kind::AcuteInvalid, "x,y,w,z,t", &text)
}

/// Wang's four-wall condition for angled corridors, with free length `r`.
///
/// Obtuse (`k = tan θ`): the ladder runs from (b, 0), b ≤ 0, to (a, k·a),
/// a ≥ 0, and meets the inner walls at (d, 1), d ≤ 0, and (c, k·c + 1),
/// c ≥ 1. The bound on c is carried over from the right-angled case, where
/// the inner wall point has y ≥ 1.
///
/// Acute (`k = tan ψ`): from (b, 0), b ≤ 0, to (−a, k·a), a ≥ 0, meeting the
/// inner walls at (d, 1) and (c, −k·(c + 1)) beyond the inner corner.
///
/// The bounds are non-strict and `r > 0` is omitted, so the degenerate
/// ladder a = b = 0 contributes the `r = 0` disjunct.
pub fn gen_angled_wang(spec: &ProblemSpec) -> Result<Formulation> {
    spec.validate()?;
    if spec.length != Length::Symbolic {
        return Err(CadError::Usage("angled Wang formulations take a symbolic length".into()));
    }
    let (kind, text) = match &spec.corridor {
        Corridor::Obtuse(k) => {
            let k = num(k);
            (
                Kind::ObtuseWang,
                format!(
                    "(E a)(E b)(E c)(E d)[(a-b)^2+{k}^2*a^2 = r^2 \
                     /\\ a >= 0 /\\ b <= 0 /\\ c >= 1 /\\ d <= 0 \
                     /\\ (a-b)-{k}*a*(d-b) = 0 /\\ (a-b)*({k}*c+1)-{k}*a*(c-b) = 0]"
                ),
            )
        }
        Corridor::Acute(k) => {
            let k = num(k);
            (
                Kind::AcuteWang,
                format!(
                    "(E a)(E b)(E c)(E d)[(a+b)^2+{k}^2*a^2 = r^2 \
                     /\\ a >= 0 /\\ b <= 0 /\\ {k}*c+{k}+1 <= 0 /\\ {k}*d+{k}+1 <= 0 \
                     /\\ -(a+b)-{k}*a*(d-b) = 0 /\\ (a+b)*(c+1)-a*(c-b) = 0]"
                ),
            )
        }
        Corridor::RightAngle => return Err(CadError::Usage("angled Wang formulations need an angled corridor".into())),
    };
    Formulation::parse(kind, "r,a,b,c,d", &text)
}

// Published reference formulas, verbatim up to notation.

const INVALID_T_FREE: &str =
    "[y < 0] \\/ [w > 0] \\/ [x > 0] \\/ [z < 0] \\/ [x+1 < 0 /\\ y-1 > 0] \\/ [w+1 < 0 /\\ z-1 > 0] \
    \\/ [w+1 < 0 /\\ y*w-w+y+x >= 0 /\\ x*z+z-y*w+w-y-x > 0] \
    \\/ [y*w-w+y+x < 0 /\\ z-1 > 0 /\\ x*z+z-y*w+w-y-x < 0] \
    \\/ [y-1 > 0 /\\ y*w-w+y+x < 0]";

const VALID_SIGNS: &str =
    "[w <= 0] /\\ [x <= 0] /\\ [y >= 0] /\\ [z >= 0] /\\ [x >= -1 \\/ y <= 1] /\\ [w >= -1 \\/ z <= 1] \
    /\\ [w*y-w+x+y < 0 \\/ w+1 >= 0 \\/ x*z+z-y*w+w-y-x <= 0] \
    /\\ [y*w-w+y+x >= 0 \\/ [[z-1 <= 0 \\/ x*z+z-y*w+w-y-x >= 0] /\\ y-1 <= 0]]";

const VALID_CAD_P: &str = "y^2*w^2-2*y*w^2+x^2*w^2+2*x*w^2+2*w^2-2*x*y^2*w+4*x*y*w-2*x^3*w-4*x^2*w-4*x*w\
    +x^2*y^2-2*x^2*y+x^4+2*x^3-7*x^2-18*x-9";

const CORRIDOR: &str = "x <= 0 /\\ y >= 0 /\\ [x+1 >= 0 \\/ y-1 <= 0]";

fn xywz() -> VarOrder {
    VarOrder::parse("x,y,w,z").unwrap()
}

/// The t-free invalid region over x ≺ y ≺ w ≺ z.
pub fn reference_invalid_t_free() -> (VarOrder, Formula) {
    let o = xywz();
    let f = parse_formula(INVALID_T_FREE, &o).unwrap();
    (o, f)
}

/// Negation of [`reference_invalid_t_free`] as published.
pub fn reference_valid_signs() -> (VarOrder, Formula) {
    let o = xywz();
    let f = parse_formula(VALID_SIGNS, &o).unwrap();
    (o, f)
}

/// Length equation conjoined with [`reference_valid_signs`]; `r2` is the squared
/// length (9 in the published version).
pub fn reference_valid(r2: &Rat) -> (VarOrder, Formula) {
    let o = xywz();
    let f = parse_formula(&format!("[(x-w)^2+(y-z)^2 = {}] /\\ {VALID_SIGNS}", num(r2)), &o).unwrap();
    (o, f)
}

/// Published output of the quantified-length CAD for length 3.
pub fn reference_valid_cad() -> (VarOrder, Formula) {
    let o = xywz();
    let p = VALID_CAD_P;
    let text = format!(
        "x <= 0 /\\ y >= 0 /\\ w <= 0 /\\ z >= 0 /\\ (y-z)^2+(x-w)^2 = 9 /\\ [\
         [x+1 >= 0 /\\ w+1 >= 0] \
         \\/ [y-1 <= 0 /\\ w+1 >= 0 /\\ {p} >= 0] \
         \\/ [x+1 >= 0 /\\ y*w-w+y+x >= 0 /\\ w^2-2*x*w+y^2-2*y+x^2-8 > 0 /\\ z-1 <= 0] \
         \\/ [x+1 >= 0 /\\ y*w-w+y+x >= 0 /\\ {p} <= 0 /\\ z-1 <= 0] \
         \\/ [y-1 <= 0 /\\ z-1 <= 0]]"
    );
    let f = parse_formula(&text, &o).unwrap();
    (o, f)
}

/// The corridor itself, over x ≺ y.
pub fn reference_corridor() -> (VarOrder, Formula) {
    let o = VarOrder::parse("x,y").unwrap();
    let f = parse_formula(CORRIDOR, &o).unwrap();
    (o, f)
}

/// Published length condition for the π/4 obtuse corridor, over `r`.
pub fn reference_obtuse_printed() -> (VarOrder, Formula) {
    let o = VarOrder::parse("r").unwrap();
    let f = parse_formula("r = 0 \\/ 2*r^6-93*r^4-172*r^2-125 >= 0", &o).unwrap();
    (o, f)
}

/// The obtuse condition with the sign of the r² term flipped: the variant
/// whose positive root is the published threshold ≈ 6.6786.
pub fn reference_obtuse_corrected() -> (VarOrder, Formula) {
    let o = VarOrder::parse("r").unwrap();
    let f = parse_formula("r = 0 \\/ 2*r^6-93*r^4+172*r^2-125 >= 0", &o).unwrap();
    (o, f)
}

/// Published length condition for the π/4 acute corridor, over `r`.
pub fn reference_acute() -> (VarOrder, Formula) {
    let o = VarOrder::parse("r").unwrap();
    let f = parse_formula("r = 0 \\/ 2*r^6+9*r^4-17*r^2-125 >= 0", &o).unwrap();
    (o, f)
}

/// Published positive thresholds: obtuse, acute.
pub const OBTUSE_THRESHOLD: f64 = 6.6786;
pub const ACUTE_THRESHOLD: f64 = 1.8443;

/// A pose of the acute π/4 corridor with one end in the outer corner and
/// the other at the inner corner: length √5, longer than the four-wall
/// threshold, yet valid. Returns (x, y, w, z).
pub fn acute_corner_pose(k: &Rat) -> [Rat; 4] {
    let zero = Rat::zero();
    let inner_x = -(k + Rat::from_integer(1.into())) / k;
    [zero.clone(), zero, inner_x, Rat::from_integer(1.into())]
}

/// Valid configurations of an angled corridor at a fixed squared length:
/// the length equation and the negated invalid region (still quantified
/// over t).
pub fn angled_valid(spec: &ProblemSpec, r2: &Rat) -> Result<Formulation> {
    let inv = match spec.corridor {
        Corridor::Obtuse(_) => gen_obtuse_invalid(spec)?,
        Corridor::Acute(_) => gen_acute_invalid(spec)?,
        Corridor::RightAngle => gen_invalid(spec)?,
    };
    let length = parse_formula(&format!("(x-w)^2+(y-z)^2 = {}", num(r2)), &inv.order)?;
    Ok(Formulation {
        kind: inv.kind,
        formula: Formula::and(vec![length, Formula::not(inv.formula)]),
        order: inv.order,
        quantified: inv.quantified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{eval_at, eval_qf, parse_poly, BoundSearch};
    use crate::poly::rat;

    fn pt(v: &[Rat]) -> Vec<Option<Rat>> {
        v.iter().cloned().map(Some).collect()
    }

    fn holds(f: &Formulation, v: &[Rat]) -> bool {
        eval_at(&f.formula, &pt(v), &BoundSearch::default()).unwrap()
    }

    #[test]
    fn davenport_structure() {
        let f = gen_davenport(&ProblemSpec::right_angle(rat(3))).unwrap();
        let Formula::And(parts) = &f.formula else { panic!() };
        assert_eq!(parts.len(), 5);
        assert_eq!(parts.iter().filter(|p| matches!(p, Formula::Or(_))).count(), 4);
        let o = &f.order;
        let Formula::Atom(a) = &parts[0] else { panic!() };
        assert_eq!(a.poly().normalize(), crate::formula::parse_poly("(x-w)^2+(y-z)^2-9", o).unwrap().normalize());
        assert!(matches!(a, crate::formula::Atom::Poly { rel: crate::formula::Relop::Eq, .. }));
        // figure pose: length² = 81/25 + 9/100 ≠ 9
        let p = a.poly().eval(&[rat(-1), ratio(3, 10), ratio(-14, 5), ratio(3, 5)]);
        assert_eq!(p + rat(9), ratio(81, 25) + ratio(9, 100));
        assert!(!holds(&f, &[rat(-1), ratio(3, 10), ratio(-14, 5), ratio(3, 5)]));
    }

    #[test]
    fn symbolic_length_goes_first() {
        let f = gen_davenport(&ProblemSpec::symbolic(Corridor::RightAngle)).unwrap();
        assert_eq!(f.order.names(), ["r", "x", "y", "w", "z"]);
        assert!(gen_davenport(&ProblemSpec::symbolic(Corridor::Acute(rat(1)))).is_err());
    }

    #[test]
    fn wang_witness() {
        let f = gen_wang(&ProblemSpec::right_angle(rat(5)), WangVariant::Full).unwrap();
        let Formula::Quant(_, _, _) = &f.formula else { panic!() };
        assert_eq!(f.quantified, vec![0, 1, 2, 3]);
        // c = a(1+b)/b, d = b(a−1)/a for a = 3, b = −4
        let (a, b) = (rat(3), rat(-4));
        let c = &a * (rat(1) + &b) / &b;
        let d = &b * (&a - rat(1)) / &a;
        assert_eq!((c.clone(), d.clone()), (ratio(9, 4), ratio(-8, 3)));
        let mut m = f.formula.clone();
        while let Formula::Quant(_, _, g) = m {
            m = *g;
        }
        assert!(eval_qf(&m, &pt(&[a, b, c, d])).unwrap());
    }

    #[test]
    fn yangzeng_at_fixed_lengths() {
        let o = VarOrder::parse("x").unwrap();
        let two = gen_yangzeng(&ProblemSpec::right_angle(rat(2))).unwrap();
        assert_eq!(two.order, o);
        let Formula::Quant(_, _, body) = &two.formula else { panic!() };
        assert_eq!(body.to_text(&o), "4*x^8 + 4*x^6 + 2*x^2 + 1 > 0");
        let three = gen_yangzeng(&ProblemSpec::right_angle(rat(3))).unwrap();
        let Formula::Quant(_, _, body) = &three.formula else { panic!() };
        let p = body.atoms()[0].poly().clone();
        // x⁴ = 3/4: 4·9/16 − 6·3/4 + 1 = −5/4
        let x4 = ratio(3, 4);
        let val = rat(4) * &x4 * &x4 - rat(6) * &x4 + rat(1);
        assert_eq!(val, ratio(-5, 4));
        assert_eq!(p.terms().len(), 3);
        assert!(holds(&two, &[]));
        assert!(!holds(&three, &[]));
    }

    #[test]
    fn invalid_poses() {
        let f = gen_invalid(&ProblemSpec::right_angle(rat(3))).unwrap();
        assert_eq!(f.quantified, vec![4]);
        assert!(holds(&f, &[rat(-2), rat(2), rat(-3), rat(2)]));
        assert!(!holds(&f, &[rat(-2), ratio(1, 2), ratio(-1, 2), ratio(1, 2)]));
        // only the middle of the ladder cuts the forbidden quadrant
        assert!(holds(&f, &[rat(-2), ratio(1, 2), ratio(-1, 2), rat(2)]));
        let (o, t_free) = reference_invalid_t_free();
        let p = pt(&[rat(-2), ratio(1, 2), ratio(-1, 2), rat(2)]);
        assert!(eval_qf(&t_free, &p).unwrap());
        assert_eq!(o.len(), 4);
    }

    #[test]
    fn reference_poses() {
        let (_, valid_ref) = reference_valid(&rat(9));
        assert!(eval_qf(&valid_ref, &pt(&[rat(-4), ratio(1, 2), rat(-1), ratio(1, 2)])).unwrap());
        assert!(!eval_qf(&valid_ref, &pt(&[rat(1), rat(0), rat(-2), rat(0)])).unwrap());
        let (_, corridor) = reference_corridor();
        assert!(eval_qf(&corridor, &pt(&[ratio(-1, 2), rat(5)])).unwrap());
        assert!(!eval_qf(&corridor, &pt(&[rat(-2), rat(2)])).unwrap());
        let (_, cad_ref) = reference_valid_cad();
        assert!(eval_qf(&cad_ref, &pt(&[rat(-4), ratio(1, 2), rat(-1), ratio(1, 2)])).unwrap());
    }

    #[test]
    fn valid_pipeline() {
        let f = gen_valid(&ProblemSpec::right_angle(rat(3))).unwrap();
        assert!(f.formula.is_quantifier_free());
        assert!(holds(&f, &[rat(-4), ratio(1, 2), rat(-1), ratio(1, 2)]));
        assert!(!holds(&f, &[rat(1), rat(0), rat(-2), rat(0)]));
    }

    #[test]
    fn angled_atoms() {
        let ob = gen_obtuse_invalid(&ProblemSpec::symbolic(Corridor::Obtuse(rat(1)))).unwrap();
        let o = &ob.order;
        let ym = crate::formula::parse_poly("y-x", o).unwrap();
        assert!(ob.formula.polys().iter().any(|p| p.normalize() == ym.normalize()));
        assert!(!holds(&ob, &[rat(-3), ratio(1, 2), rat(-1), ratio(1, 2)]));
        let ac = gen_acute_invalid(&ProblemSpec::symbolic(Corridor::Acute(rat(1)))).unwrap();
        let x2 = crate::formula::parse_poly("x+2", &ac.order).unwrap();
        assert!(ac.formula.polys().iter().any(|p| p.normalize() == x2.normalize()));
        assert!(gen_acute_invalid(&ProblemSpec::symbolic(Corridor::Acute(rat(0)))).is_err());
        assert!(gen_acute_invalid(&ProblemSpec::symbolic(Corridor::Obtuse(rat(1)))).is_err());
    }

    #[test]
    fn acute_corner_pose_fits() {
        let spec = ProblemSpec::symbolic(Corridor::Acute(rat(1)));
        let pose = acute_corner_pose(&rat(1));
        let dx = &pose[0] - &pose[2];
        let dy = &pose[1] - &pose[3];
        assert_eq!(&dx * &dx + &dy * &dy, rat(5));
        let v = angled_valid(&spec, &rat(5)).unwrap();
        assert!(holds(&v, &pose));
    }

    #[test]
    fn kinds_round_trip_names() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
        }
        assert!("ladder".parse::<Kind>().is_err());
    }

    #[test]
    fn reorder_keeps_meaning() {
        let f = gen_wang(&ProblemSpec::symbolic(Corridor::RightAngle), WangVariant::Full).unwrap();
        let o = VarOrder::parse("r,c,d,a,b").unwrap();
        let g = f.reorder(&o).unwrap();
        assert_eq!(g.quantified.len(), 4);
        assert_eq!(g.text().len(), g.formula.to_text(&o).len());
        assert!(f.reorder(&VarOrder::parse("r,a,b,c").unwrap()).is_err());
    }

    #[test]
    fn length_equation_is_the_constraint() {
        let f = gen_wang(&ProblemSpec::symbolic(Corridor::RightAngle), WangVariant::Full).unwrap();
        let ec = f.equational_constraint().unwrap();
        assert_eq!(ec.normalize(), parse_poly("a^2+b^2-r^2", &f.order).unwrap().normalize());
        let g = gen_angled_wang(&ProblemSpec::symbolic(Corridor::Acute(rat(1)))).unwrap();
        let ec = g.equational_constraint().unwrap();
        assert_eq!(ec.normalize(), parse_poly("(a+b)^2+a^2-r^2", &g.order).unwrap().normalize());
        assert!(gen_yangzeng(&ProblemSpec::symbolic(Corridor::RightAngle)).unwrap().equational_constraint().is_none());
    }
}
