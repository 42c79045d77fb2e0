//! Words to matrices: the functor from formal words to the Grothendieck-group model.

use crate::braid::{rickard_t, rickard_t_inv, rotation_r_prime, rotation_r_prime_inv, shifted_t, shifted_t_inv};
use crate::kmodel::{Dir, Model, ModelError, Operator};
use crate::linalg::Matrix;
use crate::weight::Weight;
use crate::word::{Factor, ShiftKind, Word};

/// Class of a single shift factor.
pub fn shift_value(model: &Model, kind: ShiftKind, amount: i64) -> crate::LaurentPoly {
    match kind {
        ShiftKind::Angle => model.angle(amount),
        ShiftKind::Cohom => model.cohom(amount),
        ShiftKind::Internal => model.internal(amount),
    }
}

fn factor_op(model: &Model, f: &Factor, k: &Weight) -> Result<Operator, ModelError> {
    match f {
        Factor::E { i, power } => Ok((*model.generator(Dir::E, *i, *power, k)?).clone()),
        Factor::F { i, power } => Ok((*model.generator(Dir::F, *i, *power, k)?).clone()),
        Factor::T { i, prime: false, inverse: false } => Ok((*rickard_t(model, *i, k)?).clone()),
        Factor::T { i, prime: false, inverse: true } => rickard_t_inv(model, *i, k),
        Factor::T { i, prime: true, inverse: false } => shifted_t(model, *i, k),
        Factor::T { i, prime: true, inverse: true } => shifted_t_inv(model, *i, k),
        Factor::RPrime { inverse: false } => rotation_r_prime(model, k),
        Factor::RPrime { inverse: true } => rotation_r_prime_inv(model, k),
        Factor::Shift { kind, amount } => Ok(model.identity(k)?.scale(&shift_value(model, *kind, *amount))),
        Factor::Idem(w) => {
            if w != k {
                return Err(ModelError::PreconditionViolated(format!("idempotent 1_{w} applied at {k}")));
            }
            model.identity(k)
        }
        Factor::ELoop { .. } | Factor::FLoop { .. } | Factor::Phi { .. } => Err(ModelError::UnsupportedFactor(f.to_string())),
    }
}

/// Compose the factor matrices right to left, starting at `source`. When the weight
/// leaves the set of nonzero objects the result is zero: the empty operator (no rows)
/// if the formal target is itself a zero object, the zero matrix otherwise.
pub fn evaluate(model: &Model, w: &Word, source: &Weight) -> Result<Operator, ModelError> {
    let level = model.config().level;
    if source.n() != model.config().n {
        return Err(ModelError::ConfigMismatch(format!("weight {source} for n = {}", model.config().n)));
    }
    for f in &w.factors {
        if matches!(f, Factor::ELoop { .. } | Factor::FLoop { .. } | Factor::Phi { .. }) {
            return Err(ModelError::UnsupportedFactor(f.to_string()));
        }
    }
    let target = w
        .target(source)
        .ok_or_else(|| ModelError::PreconditionViolated(format!("idempotent mismatch in `{w}` from {source}")))?;
    if !source.is_nonzero_object(level) {
        return Ok(Operator { source: source.clone(), target, matrix: Matrix::zeros(0, 0) });
    }
    let mut op = model.identity(source)?;
    for f in w.factors.iter().rev() {
        let next = f.act(&op.target).expect("checked above");
        if !next.is_nonzero_object(level) {
            if target.is_nonzero_object(level) {
                return model.zero_op(source, &target);
            }
            let cols = op.matrix.cols();
            return Ok(Operator { source: source.clone(), target, matrix: Matrix::zeros(0, cols) });
        }
        let m = factor_op(model, f, &op.target)?;
        op = m.compose(&op)?;
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmodel::{Convention, ModelConfig};
    use crate::word::parse;
    use crate::{qint, LaurentPoly, Side};

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn sl2_example() {
        let model = Model::new(ModelConfig::new(Side::Skew, 2, 2, 2).unwrap(), Convention::DEFAULT);
        let k = w("(0,2)");
        let ef = evaluate(&model, &parse("E1 F1 1_(0,2)").unwrap(), &k).unwrap();
        let fe = evaluate(&model, &parse("F1 E1 1_(0,2)").unwrap(), &k).unwrap();
        let diff = ef.matrix.try_sub(&fe.matrix).unwrap();
        assert_eq!(diff, Matrix::identity(1).scale(&model.qint(2)));
        assert_eq!(ef.matrix[(0, 0)], model.from_v(&qint(2)));
        assert!(evaluate(&model, &parse("1_(0,2)").unwrap(), &k).unwrap().matrix.is_identity());
        let zero = evaluate(&model, &parse("E1 1_(0,2)").unwrap(), &k).unwrap();
        assert_eq!(zero.matrix.rows(), 0);
        let shifted = evaluate(&model, &parse("<1> 1_(0,2)").unwrap(), &k).unwrap();
        assert_eq!(shifted.matrix[(0, 0)], LaurentPoly::q_pow(-1).scale(-1));
        assert!(matches!(evaluate(&model, &parse("phi1 1_(0,2)").unwrap(), &k), Err(ModelError::UnsupportedFactor(_))));
    }
}
