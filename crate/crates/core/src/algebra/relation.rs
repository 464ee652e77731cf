use std::any::Any;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::residual::Element;

type Memo = RefCell<Vec<(Rc<dyn Any>, Rc<dyn Any>)>>;

/// A finite, ordered set of elements with stable indices.
#[derive(Clone, Debug)]
pub struct Carrier<A> {
    elems: Vec<A>,
    index: BTreeMap<A, usize>,
    memo: Memo,
}

impl<A: PartialEq> PartialEq for Carrier<A> {
    fn eq(&self, other: &Self) -> bool {
        self.elems == other.elems
    }
}

impl<A: Eq> Eq for Carrier<A> {}

impl<A: Element> Carrier<A> {
    pub fn new(elems: impl IntoIterator<Item = A>) -> Rc<Self> {
        let mut elems: Vec<A> = elems.into_iter().collect();
        elems.sort();
        elems.dedup();
        let index = elems.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Rc::new(Carrier { elems, index, memo: RefCell::default() })
    }

    /// A value derived from this carrier and `key`, computed once per key
    /// and result type.
    pub(crate) fn memo<K: Any, V: Any>(&self, key: &Rc<K>, compute: impl FnOnce() -> V) -> Rc<V> {
        let hit = self.memo.borrow().iter().find_map(|(k, v)| {
            let same_key = k.clone().downcast::<K>().is_ok_and(|k| Rc::ptr_eq(&k, key));
            if same_key {
                v.clone().downcast::<V>().ok()
            } else {
                None
            }
        });
        hit.unwrap_or_else(|| {
            let v = Rc::new(compute());
            self.memo.borrow_mut().push((key.clone(), v.clone()));
            v
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, i: usize) -> &A {
        &self.elems[i]
    }

    pub fn index_of(&self, a: &A) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &A> {
        self.elems.iter()
    }
}

/// A relation between two carriers, stored as sorted rows of right-hand
/// indices.
#[derive(Clone)]
pub struct Relation<A, B> {
    left: Rc<Carrier<A>>,
    right: Rc<Carrier<B>>,
    rows: Vec<Vec<usize>>,
}

fn same<T>(a: &Rc<T>, b: &Rc<T>, what: &str) -> Result<()> {
    if Rc::ptr_eq(a, b) {
        Ok(())
    } else {
        Err(Error::CarrierMismatch(what.to_string()))
    }
}

impl<A: Element, B: Element> Relation<A, B> {
    pub fn empty(left: &Rc<Carrier<A>>, right: &Rc<Carrier<B>>) -> Self {
        Relation { left: left.clone(), right: right.clone(), rows: vec![Vec::new(); left.len()] }
    }

    pub fn full(left: &Rc<Carrier<A>>, right: &Rc<Carrier<B>>) -> Self {
        let row: Vec<usize> = (0..right.len()).collect();
        Relation { left: left.clone(), right: right.clone(), rows: vec![row; left.len()] }
    }

    pub fn from_fn(left: &Rc<Carrier<A>>, right: &Rc<Carrier<B>>, holds: impl Fn(&A, &B) -> bool) -> Self {
        let rows = left
            .iter()
            .map(|a| right.iter().enumerate().filter(|(_, b)| holds(a, b)).map(|(j, _)| j).collect())
            .collect();
        Relation { left: left.clone(), right: right.clone(), rows }
    }

    /// Builds the relation from each left element's image. Images must lie
    /// in the right carrier.
    pub fn from_image(left: &Rc<Carrier<A>>, right: &Rc<Carrier<B>>, image: impl Fn(&A) -> Vec<B>) -> Result<Self> {
        let mut rows = Vec::with_capacity(left.len());
        for a in left.iter() {
            let mut row = Vec::new();
            for b in image(a) {
                let j = right
                    .index_of(&b)
                    .ok_or_else(|| Error::CarrierMismatch(format!("{b} is outside the right carrier")))?;
                row.push(j);
            }
            row.sort_unstable();
            row.dedup();
            rows.push(row);
        }
        Ok(Relation { left: left.clone(), right: right.clone(), rows })
    }

    /// Index pairs; out-of-range indices are ignored.
    pub fn from_indices(
        left: &Rc<Carrier<A>>,
        right: &Rc<Carrier<B>>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut rel = Relation::empty(left, right);
        for (i, j) in pairs {
            if i < left.len() && j < right.len() {
                rel.rows[i].push(j);
            }
        }
        for row in &mut rel.rows {
            row.sort_unstable();
            row.dedup();
        }
        rel
    }

    /// Each pair is included independently with probability `density`.
    pub fn random(left: &Rc<Carrier<A>>, right: &Rc<Carrier<B>>, density: f64, rng: &mut impl Rng) -> Self {
        let rows = (0..left.len()).map(|_| (0..right.len()).filter(|_| rng.gen_bool(density)).collect()).collect();
        Relation { left: left.clone(), right: right.clone(), rows }
    }

    pub fn left(&self) -> &Rc<Carrier<A>> {
        &self.left
    }

    pub fn right(&self) -> &Rc<Carrier<B>> {
        &self.right
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    /// False for elements outside the carriers.
    pub fn holds(&self, a: &A, b: &B) -> bool {
        match (self.left.index_of(a), self.right.index_of(b)) {
            (Some(i), Some(j)) => self.rows[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn index_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| row.iter().map(move |&j| (i, j)))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&A, &B)> + '_ {
        self.index_pairs().map(|(i, j)| (self.left.get(i), self.right.get(j)))
    }

    /// `self OO other`: `a` relates to `c` when some `b` has `self a b` and
    /// `other b c`.
    pub fn compose<C: Element>(&self, other: &Relation<B, C>) -> Result<Relation<A, C>> {
        same(&self.right, &other.left, "composition of relations over different middle carriers")?;
        let mut mark = vec![usize::MAX; other.right.len()];
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut out = Vec::new();
                for &j in row {
                    for &k in &other.rows[j] {
                        if mark[k] != i {
                            mark[k] = i;
                            out.push(k);
                        }
                    }
                }
                out.sort_unstable();
                out
            })
            .collect();
        Ok(Relation { left: self.left.clone(), right: other.right.clone(), rows })
    }

    pub fn converse(&self) -> Relation<B, A> {
        let mut rows = vec![Vec::new(); self.right.len()];
        for (i, j) in self.index_pairs() {
            rows[j].push(i);
        }
        Relation { left: self.right.clone(), right: self.left.clone(), rows }
    }

    pub fn union(&self, other: &Relation<A, B>) -> Result<Relation<A, B>> {
        self.check_carriers(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut row: Vec<usize> = a.iter().chain(b).copied().collect();
                row.sort_unstable();
                row.dedup();
                row
            })
            .collect();
        Ok(Relation { left: self.left.clone(), right: self.right.clone(), rows })
    }

    /// `self ≤ other`.
    pub fn is_subset(&self, other: &Relation<A, B>) -> Result<bool> {
        self.check_carriers(other)?;
        Ok(self.rows.iter().zip(&other.rows).all(|(a, b)| a.iter().all(|j| b.binary_search(j).is_ok())))
    }

    pub fn equals(&self, other: &Relation<A, B>) -> Result<bool> {
        self.check_carriers(other)?;
        Ok(self.rows == other.rows)
    }

    /// Pairs in exactly one of the two relations, each flagged with whether
    /// it belongs to `self`.
    pub fn difference(&self, other: &Relation<A, B>) -> Result<Vec<(usize, usize, bool)>> {
        self.check_carriers(other)?;
        let mut out = Vec::new();
        for (i, (a, b)) in self.rows.iter().zip(&other.rows).enumerate() {
            out.extend(a.iter().filter(|j| b.binary_search(j).is_err()).map(|&j| (i, j, true)));
            out.extend(b.iter().filter(|j| a.binary_search(j).is_err()).map(|&j| (i, j, false)));
        }
        Ok(out)
    }

    fn check_carriers(&self, other: &Relation<A, B>) -> Result<()> {
        same(&self.left, &other.left, "left carriers differ")?;
        same(&self.right, &other.right, "right carriers differ")
    }
}

impl<A: Element> Relation<A, A> {
    pub fn identity(carrier: &Rc<Carrier<A>>) -> Self {
        Relation { left: carrier.clone(), right: carrier.clone(), rows: (0..carrier.len()).map(|i| vec![i]).collect() }
    }
}

impl<A: Element, B: Element> fmt::Debug for Relation<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}
