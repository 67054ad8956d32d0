use super::{FnNode, Piece, SAFunction};
use crate::error::{Error, Result};
use crate::function::resolve::{Chart, Region};
use crate::poly::Poly;
use crate::ratfn::RatFn;

/// Checks continuity across shared faces and certifies that denominators do
/// not vanish, recursing through composite expressions.
pub fn validate(f: &SAFunction) -> Result<()> {
    match f.node() {
        FnNode::Const(_) | FnNode::Poly(_) => Ok(()),
        FnNode::Piecewise(pieces) => {
            let domain = f.domain();
            for p in pieces {
                check_denominator(p, domain)?;
            }
            for (i, a) in pieces.iter().enumerate() {
                for b in &pieces[i + 1..] {
                    let face = a.simplex.intersection(&b.simplex);
                    if face.is_empty() {
                        continue;
                    }
                    let chart = Chart::simplex(domain, &face);
                    let ra = a.value.compose(chart.coords(), chart.nvars());
                    let rb = b.value.compose(chart.coords(), chart.nvars());
                    if !ra.same_as(&rb) {
                        return Err(Error::Discontinuous { face: face.to_vec() });
                    }
                }
            }
            Ok(())
        }
        FnNode::Compose(g, m) => {
            validate(g)?;
            m.components().iter().try_for_each(validate)
        }
        FnNode::Sum(parts) | FnNode::Product(parts) => parts.iter().try_for_each(validate),
        FnNode::Scale(_, g) => validate(g),
    }
}

fn check_denominator(p: &Piece, domain: &crate::complex::GeoComplex) -> Result<()> {
    if p.value.is_poly() {
        return Ok(());
    }
    let chart = Chart::simplex(domain, &p.simplex);
    let den = RatFn::poly(p.value.den().clone()).compose(chart.coords(), chart.nvars());
    let den = den.num().clone();
    let mut stack = vec![Region::reference(p.simplex.dim())];
    while let Some(r) = stack.pop() {
        let local = reparametrize(&den, &r);
        if local.bernstein_sign().is_some_and(|s| s != 0) {
            continue;
        }
        if r.vertices.iter().any(|v| local_value_zero(&den, v)) {
            return Err(Error::DenominatorVanishes(p.simplex.to_vec()));
        }
        if r.depth >= super::DEFAULT_DEPTH_LIMIT {
            return Err(Error::DenominatorUndecided(p.simplex.to_vec()));
        }
        stack.extend(r.bisect());
    }
    Ok(())
}

fn reparametrize(p: &Poly, r: &Region) -> Poly {
    let k = r.dim();
    let args: Vec<Poly> = (0..k)
        .map(|j| {
            let lin: Vec<_> = (1..=k).map(|i| &r.vertices[i][j] - &r.vertices[0][j]).collect();
            Poly::affine(r.vertices[0][j].clone(), &lin)
        })
        .collect();
    p.compose(&args, k)
}

fn local_value_zero(p: &Poly, v: &[crate::rational::Q]) -> bool {
    num_traits::Zero::is_zero(&p.eval(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, subdivided_interval, Simplex};
    use crate::rational::q;

    #[test]
    fn mismatched_pieces_are_rejected() {
        let k = subdivided_interval(q(0), q(2), 2);
        let bad = SAFunction::piecewise(
            &k,
            vec![
                (Simplex::new(vec![0, 1]), RatFn::poly(Poly::var(1, 0))),
                (Simplex::new(vec![1, 2]), RatFn::poly(Poly::affine(q(1), &[q(1)]))),
            ],
        );
        assert_eq!(bad.unwrap_err(), Error::Discontinuous { face: vec![1] });
        let ok = SAFunction::piecewise(
            &k,
            vec![
                (Simplex::new(vec![0, 1]), RatFn::poly(Poly::var(1, 0))),
                (Simplex::new(vec![1, 2]), RatFn::poly(Poly::affine(q(2), &[q(-1)]))),
            ],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn vanishing_denominator_is_rejected() {
        let k = interval(q(-1), q(1));
        let inv = RatFn::new(Poly::one(1), Poly::var(1, 0));
        let err = SAFunction::piecewise(&k, vec![(Simplex::new(vec![0, 1]), inv.clone())]).unwrap_err();
        assert!(matches!(err, Error::DenominatorVanishes(_) | Error::DenominatorUndecided(_)));
        let k = interval(q(1), q(2));
        assert!(SAFunction::piecewise(&k, vec![(Simplex::new(vec![0, 1]), inv)]).is_ok());
    }

    #[test]
    fn vertex_interpolants_are_continuous() {
        let k = crate::complex::standard_simplex(2);
        let sd = crate::complex::barycentric_subdivision(&k);
        let vals: Vec<_> = (0..sd.complex.num_vertices()).map(|i| q(i as i64 * 3 % 5)).collect();
        let f = SAFunction::pl(&sd.complex, &vals);
        validate(&f).unwrap();
    }
}
