//! Colors and measurable sets over the color space `[0,1] ∪ {labels}`.
//!
//! The color space is the disjoint union of the unit interval (continuous
//! colors) and a countable set of integer labels (discrete colors). The metric
//! is `|x - y|` on the interval, the discrete metric on labels, and `1` across
//! the two parts.
//!
//! [`SetExpr`] is a finite union of intervals (with per-endpoint closedness)
//! together with a finite or cofinite set of labels. Single points are stored
//! as degenerate closed intervals `[x, x]`. The class is closed under union,
//! intersection and complement, and membership is exact.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Color {
    Label(u32),
    Point(f64),
}

impl Color {
    pub fn point(x: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&x) {
            Ok(Color::Point(x))
        } else {
            Err(invalid(format!("continuous color {x} outside [0,1]")))
        }
    }

    pub fn is_label(&self) -> bool {
        matches!(self, Color::Label(_))
    }

    pub fn distance(&self, other: &Color) -> f64 {
        match (self, other) {
            (Color::Point(x), Color::Point(y)) => (x - y).abs(),
            (Color::Label(a), Color::Label(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            _ => 1.0,
        }
    }
}

// Bitwise identity on the coordinate: two draws are the same atom only if they
// are the very same float.
impl PartialEq for Color {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Color::Label(a), Color::Label(b)) => a == b,
            (Color::Point(x), Color::Point(y)) => x.to_bits() == y.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Color {}

impl Hash for Color {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Color::Label(a) => {
                0u8.hash(state);
                a.hash(state);
            }
            Color::Point(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
        }
    }
}

// Labels before points, points by `total_cmp`, which agrees with the bitwise
// equality above.
impl Ord for Color {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Color::Label(a), Color::Label(b)) => a.cmp(b),
            (Color::Point(x), Color::Point(y)) => x.total_cmp(y),
            (Color::Label(_), Color::Point(_)) => std::cmp::Ordering::Less,
            (Color::Point(_), Color::Label(_)) => std::cmp::Ordering::Greater,
        }
    }
}

impl PartialOrd for Color {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Label(a) => write!(f, "#{a}"),
            Color::Point(x) => write!(f, "{x}"),
        }
    }
}

/// A nonempty sub-interval of `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let iv = Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        };
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
            return Err(invalid(format!("interval {iv} not inside [0,1]")));
        }
        if iv.is_empty() {
            return Err(invalid(format!("interval {iv} is empty")));
        }
        Ok(iv)
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, true)
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    fn raw(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi || (self.lo == self.hi && self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Distance from `x` to the closure of the interval.
    pub fn distance(&self, x: f64) -> f64 {
        (self.lo - x).max(x - self.hi).max(0.0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() && self.lo_closed && self.hi_closed {
            return write!(f, "{{{}}}", self.lo);
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{},{}{r}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelSet {
    Only(BTreeSet<u32>),
    AllExcept(BTreeSet<u32>),
}

impl LabelSet {
    pub fn none() -> Self {
        LabelSet::Only(BTreeSet::new())
    }

    pub fn all() -> Self {
        LabelSet::AllExcept(BTreeSet::new())
    }

    pub fn contains(&self, label: u32) -> bool {
        match self {
            LabelSet::Only(s) => s.contains(&label),
            LabelSet::AllExcept(s) => !s.contains(&label),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, LabelSet::Only(s) if s.is_empty())
    }

    pub fn complement(&self) -> Self {
        match self {
            LabelSet::Only(s) => LabelSet::AllExcept(s.clone()),
            LabelSet::AllExcept(s) => LabelSet::Only(s.clone()),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        use LabelSet::*;
        match (self, other) {
            (Only(a), Only(b)) => Only(a | b),
            (Only(a), AllExcept(b)) | (AllExcept(b), Only(a)) => AllExcept(b - a),
            (AllExcept(a), AllExcept(b)) => AllExcept(a & b),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetExpr {
    intervals: Vec<Interval>,
    labels: LabelSet,
}

impl SetExpr {
    pub fn new(intervals: Vec<Interval>, labels: LabelSet) -> Self {
        SetExpr {
            intervals: normalize(intervals),
            labels,
        }
    }

    pub fn empty() -> Self {
        SetExpr {
            intervals: Vec::new(),
            labels: LabelSet::none(),
        }
    }

    /// The whole color space: `[0,1]` and every label.
    pub fn full() -> Self {
        SetExpr {
            intervals: vec![Interval::raw(0.0, 1.0, true, true)],
            labels: LabelSet::all(),
        }
    }

    pub fn unit_interval() -> Self {
        Self::interval(Interval::raw(0.0, 1.0, true, true))
    }

    pub fn interval(iv: Interval) -> Self {
        Self::new(vec![iv], LabelSet::none())
    }

    /// `(lo, hi]`, the workhorse probe shape.
    pub fn left_open(lo: f64, hi: f64) -> Result<Self> {
        Ok(Self::interval(Interval::left_open(lo, hi)?))
    }

    pub fn points(xs: &[f64]) -> Result<Self> {
        let ivs = xs
            .iter()
            .map(|&x| Interval::closed(x, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(ivs, LabelSet::none()))
    }

    pub fn labels<I: IntoIterator<Item = u32>>(labels: I) -> Self {
        SetExpr {
            intervals: Vec::new(),
            labels: LabelSet::Only(labels.into_iter().collect()),
        }
    }

    pub fn from_colors<'a, I: IntoIterator<Item = &'a Color>>(colors: I) -> Self {
        let mut ivs = Vec::new();
        let mut labels = BTreeSet::new();
        for c in colors {
            match *c {
                Color::Label(l) => {
                    labels.insert(l);
                }
                Color::Point(x) => ivs.push(Interval::raw(x, x, true, true)),
            }
        }
        Self::new(ivs, LabelSet::Only(labels))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn label_set(&self) -> &LabelSet {
        &self.labels
    }

    pub fn contains(&self, color: &Color) -> bool {
        match *color {
            Color::Label(l) => self.labels.contains(l),
            Color::Point(x) => self.contains_point(x),
        }
    }

    pub fn contains_point(&self, x: f64) -> bool {
        // Intervals are sorted and disjoint; the candidate is the last one
        // starting at or before x.
        let idx = self.intervals.partition_point(|iv| iv.lo <= x);
        idx > 0 && self.intervals[idx - 1].contains(x)
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.labels.is_empty()
    }

    pub fn union(&self, other: &SetExpr) -> SetExpr {
        let mut ivs = self.intervals.clone();
        ivs.extend_from_slice(&other.intervals);
        SetExpr::new(ivs, self.labels.union(&other.labels))
    }

    pub fn complement(&self) -> SetExpr {
        let mut out = Vec::new();
        let (mut lo, mut lo_closed) = (0.0, true);
        for iv in &self.intervals {
            let gap = Interval::raw(lo, iv.lo, lo_closed, !iv.lo_closed);
            if !gap.is_empty() {
                out.push(gap);
            }
            lo = iv.hi;
            lo_closed = !iv.hi_closed;
        }
        let gap = Interval::raw(lo, 1.0, lo_closed, true);
        if !gap.is_empty() {
            out.push(gap);
        }
        SetExpr {
            intervals: out,
            labels: self.labels.complement(),
        }
    }

    pub fn intersection(&self, other: &SetExpr) -> SetExpr {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &SetExpr) -> SetExpr {
        self.intersection(&other.complement())
    }

    /// Metric distance from `color` to the set; `f64::INFINITY` for the empty set.
    pub fn distance(&self, color: &Color) -> f64 {
        if self.contains(color) {
            return 0.0;
        }
        match *color {
            Color::Point(x) => {
                let within = self
                    .intervals
                    .iter()
                    .map(|iv| iv.distance(x))
                    .fold(f64::INFINITY, f64::min);
                if self.labels.is_empty() {
                    within
                } else {
                    within.min(1.0)
                }
            }
            Color::Label(_) => {
                if self.is_empty() {
                    f64::INFINITY
                } else {
                    1.0
                }
            }
        }
    }

    /// The open enlargement `{x : d(x, self) < delta}`.
    pub fn neighborhood(&self, delta: f64) -> SetExpr {
        if self.is_empty() || delta <= 0.0 {
            return if delta <= 0.0 { SetExpr::empty() } else { self.clone() };
        }
        if delta > 1.0 {
            return SetExpr::full();
        }
        let ivs = self
            .intervals
            .iter()
            .map(|iv| {
                let (lo, lo_closed) = if iv.lo - delta < 0.0 {
                    (0.0, true)
                } else {
                    (iv.lo - delta, false)
                };
                let (hi, hi_closed) = if iv.hi + delta > 1.0 {
                    (1.0, true)
                } else {
                    (iv.hi + delta, false)
                };
                Interval::raw(lo, hi, lo_closed, hi_closed)
            })
            .filter(|iv| !iv.is_empty())
            .collect();
        SetExpr::new(ivs, self.labels.clone())
    }
}

fn normalize(mut ivs: Vec<Interval>) -> Vec<Interval> {
    ivs.retain(|iv| !iv.is_empty());
    ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
    let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        if let Some(cur) = out.last_mut() {
            let touches = iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_closed || iv.lo_closed));
            if touches {
                if iv.hi > cur.hi {
                    cur.hi = iv.hi;
                    cur.hi_closed = iv.hi_closed;
                } else if iv.hi == cur.hi {
                    cur.hi_closed |= iv.hi_closed;
                }
                continue;
            }
        }
        out.push(iv);
    }
    out
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.intervals.iter().map(|iv| iv.to_string()).collect();
        let join = |s: &BTreeSet<u32>| s.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        match &self.labels {
            LabelSet::Only(s) if s.is_empty() => {}
            LabelSet::Only(s) => parts.push(format!("#{{{}}}", join(s))),
            LabelSet::AllExcept(s) if s.is_empty() => parts.push("labels".into()),
            LabelSet::AllExcept(s) => parts.push(format!("#!{{{}}}", join(s))),
        }
        if parts.is_empty() {
            write!(f, "empty")
        } else {
            write!(f, "{}", parts.join(" u "))
        }
    }
}

/// Parses the textual set syntax used in configuration files.
///
/// Terms are joined by `u` (or `∪`):
/// `(a,b]`, `[a,b)`, `[a,b]`, `(a,b)` intervals; `{x,y}` points;
/// `#3` or `#{0,2}` labels; `#!{1}` all labels but 1; `labels`; `all`; `empty`.
impl FromStr for SetExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::SetSyntax {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let normalized = s.replace('∪', " u ");
        let mut acc = SetExpr::empty();
        for term in normalized.split(" u ") {
            let t = term.trim();
            let set = match t {
                "" => return Err(err("empty term")),
                "all" => SetExpr::full(),
                "empty" => SetExpr::empty(),
                "labels" => SetExpr::new(Vec::new(), LabelSet::all()),
                _ if t.starts_with("#!{") && t.ends_with('}') => {
                    let labels = parse_labels(&t[3..t.len() - 1]).map_err(|r| err(&r))?;
                    SetExpr::new(Vec::new(), LabelSet::AllExcept(labels))
                }
                _ if t.starts_with("#{") && t.ends_with('}') => {
                    let labels = parse_labels(&t[2..t.len() - 1]).map_err(|r| err(&r))?;
                    SetExpr::new(Vec::new(), LabelSet::Only(labels))
                }
                _ if t.starts_with('#') => {
                    let l = t[1..].trim().parse::<u32>().map_err(|_| err("bad label"))?;
                    SetExpr::labels([l])
                }
                _ if t.starts_with('{') && t.ends_with('}') => {
                    let xs = t[1..t.len() - 1]
                        .split(',')
                        .map(|x| x.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| err("bad point"))?;
                    SetExpr::points(&xs).map_err(|e| err(&e.to_string()))?
                }
                _ => {
                    let lo_closed = match t.chars().next() {
                        Some('[') => true,
                        Some('(') => false,
                        _ => return Err(err("unrecognized term")),
                    };
                    let hi_closed = match t.chars().last() {
                        Some(']') => true,
                        Some(')') => false,
                        _ => return Err(err("unterminated interval")),
                    };
                    let body = &t[1..t.len() - 1];
                    let (a, b) = body.split_once(',').ok_or_else(|| err("interval needs two endpoints"))?;
                    let a = a.trim().parse::<f64>().map_err(|_| err("bad endpoint"))?;
                    let b = b.trim().parse::<f64>().map_err(|_| err("bad endpoint"))?;
                    let iv = Interval::new(a, b, lo_closed, hi_closed).map_err(|e| err(&e.to_string()))?;
                    SetExpr::interval(iv)
                }
            };
            acc = acc.union(&set);
        }
        Ok(acc)
    }
}

fn parse_labels(body: &str) -> std::result::Result<BTreeSet<u32>, String> {
    if body.trim().is_empty() {
        return Ok(BTreeSet::new());
    }
    body.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad label {x:?}")))
        .collect()
}
