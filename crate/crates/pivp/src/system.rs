//! Polynomial ODE systems y' = p(y) with an initial-state template.
//!
//! The field polynomials never mention parameters once a system is closed:
//! parameters live only in the initial template, either directly (a named
//! slot) or through a derived slot whose defining expression is recorded in
//! `slot_defs`. Open systems (with symbolic parameters still inside the
//! field) are supported only as inputs to `lift_params`.

use crate::error::{Error, Result};
use crate::expr::RealExpr;
use crate::poly::{format_coef, parse_coef, Monomial, Poly};
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq)]
pub enum InitValue {
    Rat(BigRational),
    Slot(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    pub dim: usize,
    /// Derivative polynomial for each coordinate; variable indices below
    /// `dim` are state coordinates, indices `dim..dim+param_syms.len()`
    /// refer to the symbolic parameters of an open system.
    pub field: Vec<Poly>,
    /// Names of parameter symbols still present in the field (open system).
    pub param_syms: Vec<String>,
    pub init: Vec<InitValue>,
    pub output: usize,
    /// Defining expressions for derived slots (and constants like pi).
    pub slot_defs: BTreeMap<String, RealExpr>,
}

impl PolySystem {
    pub fn is_closed(&self) -> bool {
        self.param_syms.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.field.len() != self.dim || self.init.len() != self.dim {
            return Err(Error::Rejected("field/init length mismatch".into()));
        }
        if self.output >= self.dim && self.dim > 0 {
            return Err(Error::Rejected("output index out of range".into()));
        }
        let limit = (self.dim + self.param_syms.len()) as u32;
        for p in &self.field {
            if let Some(v) = p.max_var() {
                if v >= limit {
                    return Err(Error::Rejected(format!(
                        "field references variable x{v} beyond dimension"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn max_degree(&self) -> u32 {
        self.field.iter().map(|p| p.total_degree()).max().unwrap_or(0)
    }

    /// Slot names appearing in the initial template, in template order.
    pub fn template_slots(&self) -> Vec<String> {
        let mut out = Vec::new();
        for iv in &self.init {
            if let InitValue::Slot(s) = iv {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    /// Direct sum of systems: block-diagonal field, concatenated initial
    /// templates. Returns the merged system plus each block's coordinate
    /// offset, so per-block outputs stay addressable.
    pub fn merge(blocks: &[PolySystem]) -> (PolySystem, Vec<usize>) {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut dim = 0usize;
        for b in blocks {
            offsets.push(dim);
            dim += b.dim;
        }
        let mut field = Vec::with_capacity(dim);
        let mut init = Vec::with_capacity(dim);
        let mut slot_defs: BTreeMap<String, RealExpr> = BTreeMap::new();
        let mut renames: Vec<HashMap<String, String>> = Vec::new();
        for (i, b) in blocks.iter().enumerate() {
            assert!(b.is_closed(), "merge requires closed systems");
            let off = offsets[i] as u32;
            let mut rename: HashMap<String, String> = HashMap::new();
            for (name, def) in &b.slot_defs {
                match slot_defs.get(name) {
                    None => {
                        slot_defs.insert(name.clone(), def.clone());
                    }
                    Some(existing) if existing == def => {}
                    Some(_) => {
                        let fresh = format!("b{i}_{name}");
                        rename.insert(name.clone(), fresh.clone());
                        slot_defs.insert(fresh, def.clone());
                    }
                }
            }
            for p in &b.field {
                field.push(p.map_vars(|v| v + off));
            }
            for iv in &b.init {
                init.push(match iv {
                    InitValue::Rat(r) => InitValue::Rat(r.clone()),
                    InitValue::Slot(s) => {
                        InitValue::Slot(rename.get(s).cloned().unwrap_or_else(|| s.clone()))
                    }
                });
            }
            renames.push(rename);
        }
        let output = blocks.first().map(|b| b.output).unwrap_or(0);
        (
            PolySystem { dim, field, param_syms: Vec::new(), init, output, slot_defs },
            offsets,
        )
    }

    /// Move symbolic parameters into constant coordinates: one new state per
    /// parameter with derivative zero and initial value equal to the
    /// parameter's slot. Field polynomials are unchanged up to renumbering,
    /// so solutions agree on the original coordinates.
    pub fn lift_params(&self) -> PolySystem {
        if self.is_closed() {
            return self.clone();
        }
        let k = self.param_syms.len();
        let mut field = self.field.clone();
        for _ in 0..k {
            field.push(Poly::zero());
        }
        let mut init = self.init.clone();
        for name in &self.param_syms {
            init.push(InitValue::Slot(name.clone()));
        }
        PolySystem {
            dim: self.dim + k,
            field,
            param_syms: Vec::new(),
            init,
            output: self.output,
            slot_defs: self.slot_defs.clone(),
        }
    }

    /// Rewrite into an equivalent system of total degree <= 2 by adding
    /// monomial coordinates reachable in the derivative closure, plus one
    /// constant coordinate fixed at 1.
    pub fn quadratize(&self) -> Result<PolySystem> {
        if !self.is_closed() {
            return Err(Error::Rejected("quadratize requires a closed system".into()));
        }
        self.validate()?;
        if self.dim == 0 {
            return Ok(self.clone());
        }
        // Monomial coordinates; the first dim entries are the original vars.
        let mut mons: Vec<Monomial> = (0..self.dim as u32).map(Monomial::var).collect();
        let mut index: HashMap<Monomial, usize> = mons
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut worklist: Vec<usize> = (0..self.dim).collect();
        let mut new_field: Vec<Option<Poly>> = vec![None; self.dim];

        // ensure a monomial has a coordinate; push to worklist when new
        fn intern(
            m: Monomial,
            mons: &mut Vec<Monomial>,
            index: &mut HashMap<Monomial, usize>,
            worklist: &mut Vec<usize>,
            new_field: &mut Vec<Option<Poly>>,
        ) -> usize {
            if let Some(&i) = index.get(&m) {
                return i;
            }
            let i = mons.len();
            index.insert(m.clone(), i);
            mons.push(m);
            new_field.push(None);
            worklist.push(i);
            i
        }

        // split a monomial of degree >= 2 into two lower-degree halves
        fn split(m: &Monomial) -> (Monomial, Monomial) {
            let total = m.degree();
            let want = total.div_ceil(2);
            let mut got = 0u32;
            let mut a: Vec<(u32, u32)> = Vec::new();
            let mut b: Vec<(u32, u32)> = Vec::new();
            for &(v, e) in &m.0 {
                let take = e.min(want - got);
                if take > 0 {
                    a.push((v, take));
                    got += take;
                }
                if e > take {
                    b.push((v, e - take));
                }
            }
            (Monomial(a), Monomial(b))
        }

        let mut guard = 0u64;
        while let Some(i) = worklist.pop() {
            guard += 1;
            if guard > 2_000_000 {
                return Err(Error::Rejected("quadratization closure too large".into()));
            }
            let m = mons[i].clone();
            // d/dt z^m = sum_v m_v z^(m - e_v) * field_v
            let mut deriv = Poly::zero();
            for v in m.vars().collect::<Vec<_>>() {
                let e = m.exponent_of(v);
                let rest = m.div_var(v).unwrap();
                let rest_poly = Poly {
                    terms: [(rest, BigRational::from(num_bigint::BigInt::from(e)))]
                        .into_iter()
                        .collect(),
                };
                deriv = deriv.add(&rest_poly.mul(&self.field[v as usize]));
            }
            // rewrite each term over the monomial coordinates
            let mut rewritten = Poly::zero();
            for (w, c) in deriv.terms {
                let term = if w.is_unit() {
                    Poly::constant(c)
                } else if let Some(&j) = index.get(&w) {
                    Poly::var(j as u32).scale(&c)
                } else if w.degree() == 1 {
                    // degree-1 monomial of an original var: always interned
                    unreachable!("degree-1 monomials are pre-interned");
                } else {
                    let (u, v) = split(&w);
                    let ju = intern(u, &mut mons, &mut index, &mut worklist, &mut new_field);
                    let jv = intern(v, &mut mons, &mut index, &mut worklist, &mut new_field);
                    Poly::var(ju as u32).mul(&Poly::var(jv as u32)).scale(&c)
                };
                rewritten = rewritten.add(&term);
            }
            new_field[i] = Some(rewritten);
        }

        // initial template for monomial coordinates: products of originals
        let mut init: Vec<InitValue> = Vec::with_capacity(mons.len() + 1);
        let mut slot_defs = self.slot_defs.clone();
        let mut derived = 0usize;
        for (i, m) in mons.iter().enumerate() {
            if i < self.dim {
                init.push(self.init[i].clone());
                continue;
            }
            // product of original initial values
            let mut rat_acc: Option<BigRational> = Some(BigRational::one());
            for &(v, e) in &m.0 {
                for _ in 0..e {
                    rat_acc = match (&rat_acc, &self.init[v as usize]) {
                        (Some(acc), InitValue::Rat(r)) => Some(acc * r),
                        _ => None,
                    };
                }
            }
            match rat_acc {
                Some(r) => init.push(InitValue::Rat(r)),
                None => {
                    // symbolic product: derived slot
                    let mut def = RealExpr::Const(BigRational::one());
                    for &(v, e) in &m.0 {
                        for _ in 0..e {
                            let factor = match &self.init[v as usize] {
                                InitValue::Rat(r) => RealExpr::Const(r.clone()),
                                InitValue::Slot(s) => RealExpr::Slot(s.clone()),
                            };
                            def = def.mul(factor);
                        }
                    }
                    let name = format!("q{derived:04}");
                    derived += 1;
                    slot_defs.insert(name.clone(), def);
                    init.push(InitValue::Slot(name));
                }
            }
        }
        // the constant coordinate: derivative 0, initial value 1
        let mut field: Vec<Poly> = new_field.into_iter().map(Option::unwrap).collect();
        field.push(Poly::zero());
        init.push(InitValue::Rat(BigRational::one()));

        let out = PolySystem {
            dim: mons.len() + 1,
            field,
            param_syms: Vec::new(),
            init,
            output: self.output,
            slot_defs,
        };
        debug_assert!(out.max_degree() <= 2);
        Ok(out)
    }

    // -- JSON ---------------------------------------------------------------

    pub fn to_json(&self) -> Value {
        let field: Vec<Value> = self
            .field
            .iter()
            .map(|p| {
                let terms: Vec<Value> = p
                    .terms
                    .iter()
                    .map(|(m, c)| {
                        json!({
                            "coef": format_coef(c),
                            "monomial": m.0.iter().map(|&(v, e)| json!([v, e])).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                Value::Array(terms)
            })
            .collect();
        let init: Vec<Value> = self
            .init
            .iter()
            .map(|iv| match iv {
                InitValue::Rat(r) => json!({"rat": format_coef(r)}),
                InitValue::Slot(s) => json!({"slot": s}),
            })
            .collect();
        let slot_defs: BTreeMap<String, Value> =
            self.slot_defs.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        json!({
            "dimension": self.dim,
            "field": field,
            "param_syms": self.param_syms,
            "initial": init,
            "output": self.output,
            "slot_defs": slot_defs,
        })
    }

    pub fn from_json(v: &Value) -> Result<PolySystem> {
        let err = |m: &str| Error::Parse(format!("PolySystem json: {m}"));
        let dim = v["dimension"].as_u64().ok_or_else(|| err("dimension"))? as usize;
        let field_json = v["field"].as_array().ok_or_else(|| err("field"))?;
        let mut field = Vec::with_capacity(field_json.len());
        for pj in field_json {
            let terms = pj.as_array().ok_or_else(|| err("field terms"))?;
            let mut poly = Poly::zero();
            for t in terms {
                let c = parse_coef(t["coef"].as_str().ok_or_else(|| err("coef"))?)
                    .ok_or_else(|| err("coef parse"))?;
                let mono = t["monomial"].as_array().ok_or_else(|| err("monomial"))?;
                let mut pairs = Vec::new();
                for p in mono {
                    let a = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| err("mono pair"))?;
                    pairs.push((
                        a[0].as_u64().ok_or_else(|| err("var"))? as u32,
                        a[1].as_u64().ok_or_else(|| err("exp"))? as u32,
                    ));
                }
                pairs.sort();
                poly = poly.add(&Poly { terms: [(Monomial(pairs), c)].into_iter().collect() });
            }
            field.push(poly);
        }
        let init_json = v["initial"].as_array().ok_or_else(|| err("initial"))?;
        let mut init = Vec::with_capacity(init_json.len());
        for iv in init_json {
            if let Some(r) = iv.get("rat") {
                init.push(InitValue::Rat(
                    parse_coef(r.as_str().ok_or_else(|| err("rat"))?).ok_or_else(|| err("rat parse"))?,
                ));
            } else if let Some(s) = iv.get("slot") {
                init.push(InitValue::Slot(s.as_str().ok_or_else(|| err("slot"))?.to_string()));
            } else {
                return Err(err("initial entry"));
            }
        }
        let param_syms = v["param_syms"]
            .as_array()
            .map(|a| {
                a.iter()
                    .map(|s| s.as_str().unwrap_or_default().to_string())
                    .collect::<Vec<_>>()
            })
            .unwrap_or_default();
        let mut slot_defs = BTreeMap::new();
        if let Some(obj) = v["slot_defs"].as_object() {
            for (k, dv) in obj {
                slot_defs.insert(k.clone(), RealExpr::from_json(dv)?);
            }
        }
        let output = v["output"].as_u64().ok_or_else(|| err("output"))? as usize;
        let sys = PolySystem { dim, field, param_syms, init, output, slot_defs };
        sys.validate()?;
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn linear_sys() -> PolySystem {
        // y' = y, y(0) = 1
        PolySystem {
            dim: 1,
            field: vec![Poly::var(0)],
            param_syms: vec![],
            init: vec![InitValue::Rat(r(1))],
            output: 0,
            slot_defs: BTreeMap::new(),
        }
    }

    #[test]
    fn merge_blocks() {
        let a = linear_sys();
        let b = PolySystem {
            dim: 1,
            field: vec![Poly::var(0).neg()],
            param_syms: vec![],
            init: vec![InitValue::Rat(r(1))],
            output: 0,
            slot_defs: BTreeMap::new(),
        };
        let (m, offs) = PolySystem::merge(&[a, b]);
        assert_eq!(m.dim, 2);
        assert_eq!(offs, vec![0, 1]);
        assert_eq!(m.field[0], Poly::var(0));
        assert_eq!(m.field[1], Poly::var(1).neg());
        let (empty, _) = PolySystem::merge(&[]);
        assert_eq!(empty.dim, 0);
    }

    #[test]
    fn lift_parameters() {
        // y' = a^2 y + a  (a symbolic, var index 1)
        let a = Poly::var(1);
        let sys = PolySystem {
            dim: 1,
            field: vec![a.mul(&a).mul(&Poly::var(0)).add(&a)],
            param_syms: vec!["a".into()],
            init: vec![InitValue::Rat(r(0))],
            output: 0,
            slot_defs: BTreeMap::new(),
        };
        let lifted = sys.lift_params();
        assert!(lifted.is_closed());
        assert_eq!(lifted.dim, 2);
        assert_eq!(lifted.field[1], Poly::zero());
        assert_eq!(lifted.init[1], InitValue::Slot("a".into()));
        // field unchanged structurally
        assert_eq!(lifted.field[0], sys.field[0]);
    }

    #[test]
    fn quadratize_cubic() {
        // y' = y^3 -> needs a y^2 coordinate
        let sys = PolySystem {
            dim: 1,
            field: vec![Poly::var(0).pow(3)],
            param_syms: vec![],
            init: vec![InitValue::Rat(BigRational::new(1.into(), 2.into()))],
            output: 0,
            slot_defs: BTreeMap::new(),
        };
        let q = sys.quadratize().unwrap();
        assert!(q.max_degree() <= 2);
        assert!(q.dim >= 3); // y, y^2, constant
        // original coordinate kept at index 0 with matching init
        assert_eq!(q.init[0], sys.init[0]);
        // constant coordinate at the end: derivative 0, init 1
        assert_eq!(q.field[q.dim - 1], Poly::zero());
        assert_eq!(q.init[q.dim - 1], InitValue::Rat(r(1)));
    }

    #[test]
    fn quadratize_keeps_low_degree() {
        let sys = linear_sys();
        let q = sys.quadratize().unwrap();
        assert!(q.max_degree() <= 2);
        assert_eq!(q.field[0], Poly::var(0));
    }

    #[test]
    fn json_roundtrip() {
        let sys = PolySystem {
            dim: 2,
            field: vec![Poly::var(1), Poly::var(0).neg()],
            param_syms: vec![],
            init: vec![
                InitValue::Rat(r(0)),
                InitValue::Slot("amp".into()),
            ],
            output: 0,
            slot_defs: [(
                "amp".to_string(),
                RealExpr::Pi.div(RealExpr::from_i64(2)),
            )]
            .into_iter()
            .collect(),
        };
        let j = sys.to_json();
        let back = PolySystem::from_json(&j).unwrap();
        assert_eq!(back, sys);
    }
}
