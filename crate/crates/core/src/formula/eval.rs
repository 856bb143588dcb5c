use super::{Formula, LassoWord};

/// Exact satisfaction `w |= f` on a lasso word.
///
/// Each subformula is evaluated to a truth vector over the folded positions.
/// Until and eventually are least fixpoints, release and always greatest.
pub fn eval_lasso(f: &Formula, w: &LassoWord) -> bool {
    truth(f, w)[0]
}

fn truth(f: &Formula, w: &LassoWord) -> Vec<bool> {
    let n = w.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(i) => (0..n).map(|k| w.letter(k) >> i & 1 == 1).collect(),
        Formula::Not(a) => truth(a, w).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip(truth(a, w), truth(b, w), |x, y| x && y),
        Formula::Or(a, b) => zip(truth(a, w), truth(b, w), |x, y| x || y),
        Formula::Implies(a, b) => zip(truth(a, w), truth(b, w), |x, y| !x || y),
        Formula::Until(a, b) => until(&truth(a, w), &truth(b, w), w),
        Formula::Release(a, b) => release(&truth(a, w), &truth(b, w), w),
        Formula::Eventually(a) => until(&vec![true; n], &truth(a, w), w),
        Formula::Always(a) => release(&vec![false; n], &truth(a, w), w),
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

fn until(a: &[bool], b: &[bool], w: &LassoWord) -> Vec<bool> {
    let mut v = vec![false; a.len()];
    fixpoint(&mut v, w, |k, next| b[k] || (a[k] && next));
    v
}

fn release(a: &[bool], b: &[bool], w: &LassoWord) -> Vec<bool> {
    let mut v = vec![true; a.len()];
    fixpoint(&mut v, w, |k, next| b[k] && (a[k] || next));
    v
}

fn fixpoint(v: &mut [bool], w: &LassoWord, step: impl Fn(usize, bool) -> bool) {
    loop {
        let mut changed = false;
        for k in (0..v.len()).rev() {
            let nv = step(k, v[w.succ(k)]);
            if nv != v[k] {
                v[k] = nv;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}
