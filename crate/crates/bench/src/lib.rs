//! Scalable generators for benchmarking generation and evaluation.

use stagelet::{
    cadd, capp, ceq, cif, cint, clam, csub, genlet, genletrec, with_locus, with_locus_rec,
    CodeValue, Locus, Semantics,
};

/// `let x1 = 1 in let x2 = x1 + 2 in ... in xn`, every binding inserted.
pub fn genlet_chain<X: Semantics>(n: i64) -> CodeValue<X> {
    with_locus(move |l| (1..=n).fold(cint(0), |prev, i| genlet(&l, i, cadd(prev, cint(i)))))
}

/// Ackermann specialized to its first argument `m`: one letrec clause per
/// `ack k` with `k <= m`.
pub fn ackermann<X: Semantics>(m: i64) -> CodeValue<X> {
    fn ack<X: Semantics>(l: &Locus, m: i64) -> CodeValue<X> {
        let l = l.clone();
        clam(move |n| {
            if m == 0 {
                cadd(n, cint(1))
            } else {
                cif(
                    ceq(n.clone(), cint(0)),
                    capp(genletrec(&l, m - 1, ack(&l, m - 1)), cint(1)),
                    capp(
                        genletrec(&l, m - 1, ack(&l, m - 1)),
                        capp(genletrec(&l, m, ack(&l, m)), csub(n, cint(1))),
                    ),
                )
            }
        })
    }
    with_locus_rec(move |l| genletrec(&l, m, ack(&l, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use stagelet::{run, show, BaseAst, Value};

    #[test]
    fn chain_sums() {
        assert_eq!(run(&genlet_chain(10)).unwrap(), Value::Int(55));
        let code = show(&genlet_chain(10)).unwrap();
        assert_eq!(code.count(&|n| matches!(n, BaseAst::Let(..))), 10);
    }

    #[test]
    fn ackermann_clauses() {
        let code = show(&ackermann(3)).unwrap();
        let BaseAst::LetRec(clauses, _) = &code else {
            panic!("expected a letrec, got {code}");
        };
        assert_eq!(clauses.len(), 4);
        let f = run(&ackermann(3)).unwrap();
        // A(3, n) = 2^(n+3) - 3
        assert_eq!(
            stagelet::examples::apply_ints(&f, &[3]).unwrap(),
            Value::Int(61)
        );
    }
}
