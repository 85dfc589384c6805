//! Expression grammar shared by backend elements and base-field scalars.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | '+' factor | atom ('^' uint)?
//! atom   := '(' expr ')' | uint | variable | 'e' '[' gref ']'
//! gref   := int | '(' int (',' int)* ')'
//! ```
//!
//! Multiplication is always explicit, exponents are nonnegative integer
//! literals, and `/` means multiplication by the inverse. The variables in
//! scope depend on the backend: `x` (FF), `y` (EXT), `t` (RF), `i j k`
//! (QUAT), `e[...]` basis vectors (GA), and `s` whenever the base field is
//! a rational-function field. Syntax errors carry the byte offset of the
//! offending token.

use num::{BigInt, ToPrimitive, Zero};

use super::backend::{Backend, Element, Kind};
use crate::error::{Error, Result};
use crate::field::{Coeff, CoeffField, Field};
use crate::groups::GroupElem;

/// Parse an element of `backend`.
pub fn parse_element(backend: &Backend, text: &str) -> Result<Element> {
    run(&BackendCtx { b: backend }, text)
}

/// Parse a scalar of the base field `k` (used for EXT modulus coefficients
/// and set files that embed scalars).
pub fn parse_coeff(k: &CoeffField, text: &str) -> Result<Coeff> {
    run(&CoeffCtx { k }, text)
}

fn run<C: EvalCtx>(ctx: &C, text: &str) -> Result<C::Value> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let v = p.expr(ctx)?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(v)
}

/// A parsed group reference `e[i]` or `e[(c1,...,cm)]`, before validation.
enum RawGroupRef {
    Index(i64),
    Tuple(Vec<i64>),
}

impl RawGroupRef {
    fn display(&self) -> String {
        match self {
            RawGroupRef::Index(i) => format!("e[{i}]"),
            RawGroupRef::Tuple(v) => {
                let body: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                format!("e[({})]", body.join(","))
            }
        }
    }
}

trait EvalCtx {
    type Value: Clone;
    fn from_int(&self, n: &BigInt) -> Self::Value;
    fn var(&self, name: u8) -> Option<Self::Value>;
    fn group_ref(&self, _g: &RawGroupRef) -> Option<Result<Self::Value>> {
        None
    }
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn invert(&self, a: &Self::Value) -> Result<Self::Value>;
}

struct CoeffCtx<'a> {
    k: &'a CoeffField,
}

impl EvalCtx for CoeffCtx<'_> {
    type Value = Coeff;

    fn from_int(&self, n: &BigInt) -> Coeff {
        self.k.from_bigint(n)
    }

    fn var(&self, name: u8) -> Option<Coeff> {
        if name == b's' {
            coeff_gen(self.k)
        } else {
            None
        }
    }

    fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.k.add(a, b)
    }

    fn neg(&self, a: &Coeff) -> Coeff {
        self.k.neg(a)
    }

    fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.k.mul(a, b)
    }

    fn invert(&self, a: &Coeff) -> Result<Coeff> {
        self.k.inv(a).ok_or(Error::ZeroDenominator)
    }
}

/// The indeterminate of a rational-function base field, as a scalar.
fn coeff_gen(k: &CoeffField) -> Option<Coeff> {
    match k {
        CoeffField::RatFnFp(f) => Some(Coeff::RatFnFp(f.gen())),
        CoeffField::RatFnQ(f) => Some(Coeff::RatFnQ(f.gen())),
        _ => None,
    }
}

struct BackendCtx<'a> {
    b: &'a Backend,
}

impl BackendCtx<'_> {
    fn quat_unit(&self, idx: usize) -> Element {
        let mut q: [num::BigRational; 4] = std::array::from_fn(|_| num::BigRational::zero());
        q[idx] = num::BigRational::from_integer(1.into());
        Element::Quaternion(q)
    }
}

impl EvalCtx for BackendCtx<'_> {
    type Value = Element;

    fn from_int(&self, n: &BigInt) -> Element {
        self.b
            .embed_scalar(&self.b.coeff_field().from_bigint(n))
            .expect("own scalar embeds")
    }

    fn var(&self, name: u8) -> Option<Element> {
        match (self.b.kind(), name) {
            (Kind::Ff { .. }, b'x')
            | (Kind::Ext { .. }, b'y')
            | (Kind::Rf { .. }, b't') => self.b.generator(),
            (Kind::Quat { .. }, b'i') => Some(self.quat_unit(1)),
            (Kind::Quat { .. }, b'j') => Some(self.quat_unit(2)),
            (Kind::Quat { .. }, b'k') => Some(self.quat_unit(3)),
            (_, b's') => {
                let c = coeff_gen(self.b.coeff_field())?;
                Some(self.b.embed_scalar(&c).expect("own scalar embeds"))
            }
            _ => None,
        }
    }

    fn group_ref(&self, g: &RawGroupRef) -> Option<Result<Element>> {
        let group = self.b.group()?;
        let elem = match g {
            RawGroupRef::Index(i) => {
                if *i < 0 {
                    return Some(Err(Error::UnknownGroupElement(g.display())));
                }
                GroupElem::Idx(*i as usize)
            }
            RawGroupRef::Tuple(v) => GroupElem::Ab(v.clone()),
        };
        // Arity and variant must match before canonicalization; reduction
        // folds torsion coordinates into [0, d).
        let identity = group.identity();
        let arity_ok = match (&identity, &elem) {
            (GroupElem::Idx(_), GroupElem::Idx(i)) => group.contains(&GroupElem::Idx(*i)),
            (GroupElem::Ab(id), GroupElem::Ab(v)) => id.len() == v.len(),
            _ => false,
        };
        if !arity_ok {
            return Some(Err(Error::UnknownGroupElement(g.display())));
        }
        let canonical = group.mul(&identity, &elem);
        let mut m = std::collections::BTreeMap::new();
        m.insert(canonical, self.b.coeff_field().one());
        Some(Ok(Element::GroupSum(m)))
    }

    fn add(&self, a: &Element, b: &Element) -> Element {
        self.b.add(a, b).expect("parser values share the backend")
    }

    fn neg(&self, a: &Element) -> Element {
        self.b.neg(a).expect("parser values share the backend")
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        self.b.mul(a, b).expect("parser values share the backend")
    }

    fn invert(&self, a: &Element) -> Result<Element> {
        self.b.inverse(a).map_err(|e| match e {
            Error::ZeroInverse => Error::ZeroDenominator,
            other => other,
        })
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{}'", b as char)))
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected a number"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("digits");
        Ok(text.parse().expect("digits form an integer"))
    }

    fn int_i64(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let at = self.pos;
        let n = self.uint()?;
        let n = if neg { -n } else { n };
        n.to_i64().ok_or(Error::Syntax {
            pos: at,
            msg: "coordinate out of range".to_string(),
        })
    }

    fn expr<C: EvalCtx>(&mut self, ctx: &C) -> Result<C::Value> {
        let mut acc = self.term(ctx)?;
        loop {
            if self.eat(b'+') {
                let t = self.term(ctx)?;
                acc = ctx.add(&acc, &t);
            } else if self.eat(b'-') {
                let t = self.term(ctx)?;
                acc = ctx.add(&acc, &ctx.neg(&t));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<C: EvalCtx>(&mut self, ctx: &C) -> Result<C::Value> {
        let mut acc = self.factor(ctx)?;
        loop {
            if self.eat(b'*') {
                let f = self.factor(ctx)?;
                acc = ctx.mul(&acc, &f);
            } else if self.eat(b'/') {
                let f = self.factor(ctx)?;
                acc = ctx.mul(&acc, &ctx.invert(&f)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor<C: EvalCtx>(&mut self, ctx: &C) -> Result<C::Value> {
        if self.eat(b'-') {
            let f = self.factor(ctx)?;
            return Ok(ctx.neg(&f));
        }
        if self.eat(b'+') {
            return self.factor(ctx);
        }
        let base = self.atom(ctx)?;
        if self.eat(b'^') {
            let at = self.pos;
            let e = self.uint()?;
            let e = e.to_u64().ok_or(Error::Syntax {
                pos: at,
                msg: "exponent out of range".to_string(),
            })?;
            return Ok(pow_value(ctx, &base, e));
        }
        Ok(base)
    }

    fn atom<C: EvalCtx>(&mut self, ctx: &C) -> Result<C::Value> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr(ctx)?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(b) if b.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(ctx.from_int(&n))
            }
            Some(b'e') if self.looks_like_group_ref() => {
                self.pos += 1;
                let gref = self.group_ref_body()?;
                match ctx.group_ref(&gref) {
                    Some(v) => v,
                    None => Err(self.syntax("group basis vectors are not available here")),
                }
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let at = self.pos;
                self.pos += 1;
                if self
                    .bytes
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric())
                {
                    self.pos = at;
                    return Err(self.syntax("variables are single letters"));
                }
                ctx.var(b).ok_or(Error::Syntax {
                    pos: at,
                    msg: format!("unknown variable '{}'", b as char),
                })
            }
            _ => Err(self.syntax("expected a value")),
        }
    }

    fn looks_like_group_ref(&mut self) -> bool {
        debug_assert_eq!(self.bytes.get(self.pos), Some(&b'e'));
        let mut j = self.pos + 1;
        while self.bytes.get(j).is_some_and(|b| b.is_ascii_whitespace()) {
            j += 1;
        }
        self.bytes.get(j) == Some(&b'[')
    }

    fn group_ref_body(&mut self) -> Result<RawGroupRef> {
        self.expect(b'[')?;
        let gref = if self.eat(b'(') {
            let mut coords = vec![self.int_i64()?];
            while self.eat(b',') {
                coords.push(self.int_i64()?);
            }
            self.expect(b')')?;
            RawGroupRef::Tuple(coords)
        } else {
            RawGroupRef::Index(self.int_i64()?)
        };
        self.expect(b']')?;
        Ok(gref)
    }
}

fn pow_value<C: EvalCtx>(ctx: &C, base: &C::Value, mut e: u64) -> C::Value {
    let mut acc: Option<C::Value> = None;
    let mut sq = base.clone();
    if e == 0 {
        return ctx.from_int(&BigInt::from(1));
    }
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => ctx.mul(&a, &sq),
            });
        }
        e >>= 1;
        if e > 0 {
            sq = ctx.mul(&sq, &sq);
        }
    }
    acc.expect("positive exponent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::descriptor::{BackendDescriptor, BaseDescriptor, GroupDescriptor};
    use crate::scalars::sample::{sample_element, SampleBudget};
    use crate::seeded::rng_for;

    fn backend(d: BackendDescriptor) -> Backend {
        Backend::create(&d).unwrap()
    }

    fn ff16() -> Backend {
        backend(BackendDescriptor::Ff {
            p: 2,
            modulus: vec![1, 1, 0, 0, 1],
        })
    }

    #[test]
    fn grammar_basics() {
        let b = ff16();
        assert_eq!(b.render(&b.parse_element("x ^ 5").unwrap()), "x^2 + x");
        assert_eq!(b.parse_element("(x+1)*(x+1)").unwrap(), {
            let e = b.parse_element("x^2+1").unwrap();
            e
        });
        // Explicit multiplication only.
        assert!(matches!(
            b.parse_element("2x"),
            Err(Error::Syntax { pos: 1, .. })
        ));
        assert!(matches!(b.parse_element("x +"), Err(Error::Syntax { .. })));
        assert!(matches!(b.parse_element(""), Err(Error::Syntax { .. })));
        assert!(matches!(
            b.parse_element("x^(2)"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            b.parse_element("q"),
            Err(Error::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            b.parse_element("1/0"),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let b = backend(BackendDescriptor::Rf {
            base: BaseDescriptor::Q,
        });
        // -t^2 + t^2 = 0, which distinguishes -(t^2) from (-t)^2.
        let e = b.parse_element("-t^2 + t^2").unwrap();
        assert!(b.is_zero(&e));
        let half = b.parse_element("-1/2").unwrap();
        assert_eq!(b.render(&half), "-1/2");
    }

    #[test]
    fn quaternion_literals() {
        let b = backend(BackendDescriptor::Quat);
        let e = b.parse_element("1 + 2*i - j").unwrap();
        let one = num::BigRational::from_integer(1.into());
        let two = num::BigRational::from_integer(2.into());
        assert_eq!(
            e,
            Element::Quaternion([one.clone(), two, -one, num::BigRational::zero()])
        );
        assert_eq!(b.render(&e), "1 + 2*i - j");
    }

    #[test]
    fn group_references() {
        let b = backend(BackendDescriptor::Ga {
            base: BaseDescriptor::Gf { p: 5 },
            group: GroupDescriptor::Abelian {
                free_rank: 0,
                torsion: vec![4],
            },
        });
        // Torsion coordinates reduce into [0, d).
        assert_eq!(
            b.parse_element("e[(7)]").unwrap(),
            b.parse_element("e[(3)]").unwrap()
        );
        assert!(matches!(
            b.parse_element("e[(1,2)]"),
            Err(Error::UnknownGroupElement(_))
        ));
        assert!(matches!(
            b.parse_element("e[2]"),
            Err(Error::UnknownGroupElement(_))
        ));
        let c = backend(BackendDescriptor::Ga {
            base: BaseDescriptor::Q,
            group: GroupDescriptor::Cayley {
                table: vec![vec![0, 1], vec![1, 0]],
            },
        });
        assert!(matches!(
            c.parse_element("e[9]"),
            Err(Error::UnknownGroupElement(_))
        ));
        assert!(matches!(
            c.parse_element("e[-1]"),
            Err(Error::UnknownGroupElement(_))
        ));
        // Division by a zero divisor is reported as such, not as syntax.
        let d = backend(BackendDescriptor::Ga {
            base: BaseDescriptor::Gf { p: 3 },
            group: GroupDescriptor::Cayley {
                table: vec![vec![0, 1], vec![1, 0]],
            },
        });
        assert!(matches!(
            d.parse_element("1/(e[0]+e[1])"),
            Err(Error::NotAUnit)
        ));
    }

    #[test]
    fn scalar_variable_in_extension_towers() {
        let k = CoeffField::rational_functions_gf(3).unwrap();
        let s = parse_coeff(&k, "s^2 + 2").unwrap();
        assert_eq!(k.fmt_elem(&s), "s^2 + 2");
        assert!(matches!(
            parse_coeff(&CoeffField::rationals(), "s"),
            Err(Error::Syntax { .. })
        ));
        let b = backend(BackendDescriptor::Ext {
            coeff: BaseDescriptor::GfRatFn { p: 2 },
            g: vec!["-s".into(), "0".into(), "1".into()],
        });
        let e = b.parse_element("(s+1)*y + s").unwrap();
        assert_eq!(b.render(&e), "(s + 1)*y + s");
    }

    fn roundtrip_backends() -> Vec<Backend> {
        vec![
            ff16(),
            backend(BackendDescriptor::Ff {
                p: 7,
                modulus: vec![1, 0, 1],
            }),
            backend(BackendDescriptor::Ext {
                coeff: BaseDescriptor::Q,
                g: vec!["-2".into(), "0".into(), "1".into()],
            }),
            backend(BackendDescriptor::Ext {
                coeff: BaseDescriptor::GfRatFn { p: 2 },
                g: vec!["-s".into(), "0".into(), "1".into()],
            }),
            backend(BackendDescriptor::Rf {
                base: BaseDescriptor::Q,
            }),
            backend(BackendDescriptor::Rf {
                base: BaseDescriptor::Gf { p: 5 },
            }),
            backend(BackendDescriptor::Quat),
            backend(BackendDescriptor::Ga {
                base: BaseDescriptor::Gf { p: 5 },
                group: GroupDescriptor::Abelian {
                    free_rank: 1,
                    torsion: vec![3],
                },
            }),
            backend(BackendDescriptor::Ga {
                base: BaseDescriptor::Q,
                group: GroupDescriptor::Cayley {
                    table: match crate::groups::Group::s3() {
                        crate::groups::Group::Cayley { table, .. } => table,
                        _ => unreachable!(),
                    },
                },
            }),
        ]
    }

    // Invariant: render is a section of parse on every backend.
    #[test]
    fn render_parse_roundtrip() {
        for (which, b) in roundtrip_backends().into_iter().enumerate() {
            let mut rng = rng_for(17, which as u64);
            let budget = SampleBudget::default();
            for _ in 0..150 {
                let e = sample_element(&b, &mut rng, &budget);
                let text = b.render(&e);
                let back = b.parse_element(&text).unwrap_or_else(|err| {
                    panic!("{}: '{text}' failed to reparse: {err}", b.label())
                });
                assert_eq!(back, e, "{}: '{text}'", b.label());
            }
            let zero = b.zero();
            assert_eq!(b.parse_element(&b.render(&zero)).unwrap(), zero);
        }
    }
}
