//! Grothendieck classes of Rickard braid operators, their shifted versions, the
//! rotation `R'` and the loop endomorphisms `A^(l)` of the highest weight.

use std::sync::Arc;

use crate::kmodel::{Dir, Model, ModelError, Operator};
use crate::laurent::LaurentPoly;
use crate::weight::Weight;

/// Slot whose entry enters the shift of `T'_i`: slot `i`, or slot `n` for `i = 0`.
fn shift_slot(n: usize, i: usize) -> usize {
    if i == 0 {
        n
    } else {
        i
    }
}

/// `T_i 1_k`, the alternating sum of the Rickard complex.
pub fn rickard_t(model: &Model, i: usize, k: &Weight) -> Result<Arc<Operator>, ModelError> {
    let key = (i, k.clone());
    if let Some(op) = model.cached_braid(&key) {
        return Ok(op);
    }
    let lam = k.pair_root(i);
    let target = k.reflect(i);
    let mut acc = model.zero_op(k, &target)?;
    let (first, second, offset) = if lam >= 0 { (Dir::E, Dir::F, lam) } else { (Dir::F, Dir::E, -lam) };
    let mut s = 0u32;
    loop {
        let inner = model.generator(second, i, s + offset as u32, k)?;
        if !inner.target.is_nonzero_object(model.config().level) {
            break;
        }
        let outer = model.generator(first, i, s, &inner.target)?;
        let term = outer.compose(&inner)?;
        let sign = if s % 2 == 0 { 1 } else { -1 };
        let c = model.angle(s as i64).scale(sign);
        acc.matrix.add_assign_scaled(&term.matrix, &c)?;
        s += 1;
    }
    if lam < 0 {
        // class of [lam]<-lam>
        let unit = model.cohom(lam).clone() * model.angle(-lam);
        acc = acc.scale(&unit);
    }
    let op = Arc::new(acc);
    model.store_braid(key, op.clone());
    Ok(op)
}

/// Unit relating `T'_i 1_k` to `T_i 1_k`: the class of `[k_i]<-k_i>`.
pub fn prime_unit(model: &Model, i: usize, k: &Weight) -> LaurentPoly {
    let ki = k.slot(shift_slot(k.n(), i));
    model.cohom(ki) * model.angle(-ki)
}

pub fn shifted_t(model: &Model, i: usize, k: &Weight) -> Result<Operator, ModelError> {
    Ok(rickard_t(model, i, k)?.scale(&prime_unit(model, i, k)))
}

/// `T_i^-1 1_k`, i.e. the inverse of `T_i 1_{s_i k}`.
pub fn rickard_t_inv(model: &Model, i: usize, k: &Weight) -> Result<Operator, ModelError> {
    rickard_t(model, i, &k.reflect(i))?.inverse()
}

pub fn shifted_t_inv(model: &Model, i: usize, k: &Weight) -> Result<Operator, ModelError> {
    shifted_t(model, i, &k.reflect(i))?.inverse()
}

/// `R' 1_k = T'_{n-2} ... T'_1 T'_0 1_k`, defined when `k_n = 0`.
pub fn rotation_r_prime(model: &Model, k: &Weight) -> Result<Operator, ModelError> {
    let n = k.n();
    if k.slot(n) != 0 {
        return Err(ModelError::PreconditionViolated(format!("R' needs k_n = 0, got {k}")));
    }
    let mut op = shifted_t(model, 0, k)?;
    for i in 1..n - 1 {
        let next = shifted_t(model, i, &op.target)?;
        op = next.compose(&op)?;
    }
    Ok(op)
}

pub fn rotation_r_prime_inv(model: &Model, k: &Weight) -> Result<Operator, ModelError> {
    rotation_r_prime(model, &k.rotate_inv())?.inverse()
}

/// Sequence of `T'` indices that moves the zeros of `k` to the right, leftmost zero first,
/// together with the resulting weight. Each step swaps a zero with its right neighbour.
pub fn canonical_identification_path(k: &Weight) -> (Vec<usize>, Weight) {
    let mut cur = k.clone();
    let mut path = Vec::new();
    let n = k.n();
    loop {
        let Some(pos) = (0..n - 1).find(|&p| cur.entries()[p] == 0 && cur.entries()[p + 1] != 0) else {
            break;
        };
        path.push(pos + 1);
        cur = cur.reflect(pos + 1);
    }
    (path, cur)
}

/// Composite of `T'_i` along [`canonical_identification_path`].
pub fn canonical_identification(model: &Model, k: &Weight) -> Result<Operator, ModelError> {
    let (path, _) = canonical_identification_path(k);
    let mut op = model.identity(k)?;
    for i in path {
        let step = shifted_t(model, i, &op.target)?;
        op = step.compose(&op)?;
    }
    Ok(op)
}

/// Word of `A^(l) 1_eta` as `(dir, index, power)` factors, leftmost first.
pub fn a_word(n: usize, l: i64) -> Vec<(Dir, usize, u32)> {
    let p = l.unsigned_abs() as u32;
    if l == 0 {
        Vec::new()
    } else if l > 0 {
        (0..n).map(|i| (Dir::F, i, p)).collect()
    } else {
        (0..n).rev().map(|i| (Dir::E, i, p)).collect()
    }
}

/// Evaluate a word of divided powers at a source weight (rightmost factor first).
pub fn eval_ef(model: &Model, factors: &[(Dir, usize, u32)], source: &Weight) -> Result<Operator, ModelError> {
    let mut op = model.identity(source)?;
    for &(dir, i, p) in factors.iter().rev() {
        let g = model.generator(dir, i, p, &op.target)?;
        op = g.compose(&op)?;
    }
    Ok(op)
}

/// `A^(l) 1_eta`
pub fn a_operator(model: &Model, l: i64) -> Result<Operator, ModelError> {
    let eta = model.config().eta();
    eval_ef(model, &a_word(model.config().n, l), &eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmodel::{Convention, ModelConfig};
    use crate::laurent::Side;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn rickard_t_is_invertible() {
        let cfg = ModelConfig { side: Side::Skew, n: 2, m: 2, level: 2 };
        let model = Model::new(cfg, Convention::DEFAULT);
        let t = rickard_t(&model, 1, &w("(1,1)")).unwrap();
        assert_eq!(t.matrix.shape(), (4, 4));
        assert!(t.matrix.det().unwrap().as_unit().is_some());
    }

    #[test]
    fn prime_units() {
        let sym = Model::new(ModelConfig { side: Side::Symmetric, n: 3, m: 2, level: 2 }, Convention::DEFAULT);
        assert_eq!(prime_unit(&sym, 1, &w("(2,0,0)")), LaurentPoly::q_pow(-2));
        let skew = Model::new(ModelConfig { side: Side::Skew, n: 3, m: 2, level: 2 }, Convention::DEFAULT);
        assert_eq!(prime_unit(&skew, 1, &w("(1,1,0)")), LaurentPoly::q_pow(1));
        assert_eq!(prime_unit(&skew, 1, &w("(0,2,0)")), LaurentPoly::one());
    }

    #[test]
    fn zeros_move_right() {
        let (path, end) = canonical_identification_path(&w("(0,2,0,1)"));
        assert_eq!(end, w("(2,1,0,0)"));
        assert_eq!(path, vec![1, 3, 2]);
    }

    #[test]
    fn a_inverse_pair() {
        for side in [Side::Skew, Side::Symmetric] {
            let model = Model::new(ModelConfig { side, n: 3, m: 2, level: 2 }, Convention::DEFAULT);
            let prod = a_operator(&model, 2).unwrap().compose(&a_operator(&model, -2).unwrap()).unwrap();
            assert!(prod.matrix.is_identity(), "{side:?}");
        }
    }
}
