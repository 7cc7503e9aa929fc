//! Name substitution (capture-avoiding) and alpha-canonicalization.

use std::collections::{BTreeMap, BTreeSet};

use crate::names::{KillerLabel, Name};
use crate::term::{free_names_with_holes_erased, PatternItem, PrefixAction, Term, Tuple};

/// A finite function on names, identity outside its domain. Applying a
/// substitution to a closed term is the identity.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Substitution {
    pub map: BTreeMap<Name, Name>,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution {
            map: BTreeMap::new(),
        }
    }

    pub fn single(from: Name, to: Name) -> Self {
        let mut map = BTreeMap::new();
        if from != to {
            map.insert(from, to);
        }
        Substitution { map }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Name)>) -> Self {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if from != to {
                map.insert(from, to);
            }
        }
        Substitution { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply_name(&self, n: &Name) -> Name {
        self.map.get(n).cloned().unwrap_or_else(|| n.clone())
    }

    fn apply_tuple(&self, t: &Tuple) -> Tuple {
        Tuple(t.0.iter().map(|n| self.apply_name(n)).collect())
    }

    fn without(&self, bound: &[&Name]) -> Substitution {
        let map = self
            .map
            .iter()
            .filter(|(k, _)| !bound.contains(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Substitution { map }
    }
}

/// Apply `s` to the free occurrences of `t`, alpha-renaming binders on demand
/// to avoid capture. Protected pattern names are free occurrences and get
/// substituted; placeholders are binders and stay untouched (modulo renames).
pub fn apply_subst(t: &Term, s: &Substitution) -> Term {
    if s.is_identity() {
        return t.clone();
    }
    match t {
        Term::Nil | Term::Kill(_) | Term::Hole(_) => t.clone(),
        Term::Prefix(act, cont) => match act {
            PrefixAction::Tau { guard } => Term::prefix(
                PrefixAction::Tau {
                    guard: subst_guard(guard, s),
                },
                apply_subst(cont, s),
            ),
            PrefixAction::Act {
                name,
                polarity,
                level,
                guard,
            } => Term::prefix(
                PrefixAction::Act {
                    name: s.apply_name(name),
                    polarity: *polarity,
                    level: *level,
                    guard: subst_guard(guard, s),
                },
                apply_subst(cont, s),
            ),
            PrefixAction::Send { subject, payload } => Term::prefix(
                PrefixAction::Send {
                    subject: s.apply_tuple(subject),
                    payload: s.apply_tuple(payload),
                },
                apply_subst(cont, s),
            ),
            PrefixAction::Receive { subject, pattern } => {
                let subject = s.apply_tuple(subject);
                let binders: Vec<Name> = pattern.placeholders().into_iter().cloned().collect();
                let binder_refs: Vec<&Name> = binders.iter().collect();
                let active = s.without(&binder_refs);
                // Rename placeholders that would capture a substituted name.
                let relevant: BTreeSet<Name> = {
                    let mut fns = free_names_with_holes_erased(cont);
                    for b in &binders {
                        fns.remove(b);
                    }
                    active
                        .map
                        .iter()
                        .filter(|(k, _)| fns.contains(*k))
                        .map(|(_, v)| v.clone())
                        .collect()
                };
                let clashing: Vec<Name> = binders
                    .iter()
                    .filter(|b| relevant.contains(*b))
                    .cloned()
                    .collect();
                let (pattern, cont) = if clashing.is_empty() {
                    (pattern.clone(), cont.as_ref().clone())
                } else {
                    let mut avoid: BTreeSet<Name> = free_names_with_holes_erased(cont);
                    avoid.extend(relevant.iter().cloned());
                    avoid.extend(binders.iter().cloned());
                    let mut rename = BTreeMap::new();
                    for b in &clashing {
                        let fresh = Name::freshen(b, &avoid);
                        avoid.insert(fresh.clone());
                        rename.insert(b.clone(), fresh);
                    }
                    let renamer = Substitution {
                        map: rename.clone(),
                    };
                    let pattern = crate::term::Pattern(
                        pattern
                            .0
                            .iter()
                            .map(|it| match it {
                                PatternItem::Placeholder(n) => PatternItem::Placeholder(
                                    rename.get(n).cloned().unwrap_or_else(|| n.clone()),
                                ),
                                PatternItem::Protected(n) => PatternItem::Protected(n.clone()),
                            })
                            .collect(),
                    );
                    (pattern, apply_subst(cont, &renamer))
                };
                // Protected names are substituted along with the subject.
                let pattern = crate::term::Pattern(
                    pattern
                        .0
                        .iter()
                        .map(|it| match it {
                            PatternItem::Placeholder(n) => PatternItem::Placeholder(n.clone()),
                            PatternItem::Protected(n) => {
                                PatternItem::Protected(active.apply_name(n))
                            }
                        })
                        .collect(),
                );
                Term::prefix(
                    PrefixAction::Receive { subject, pattern },
                    apply_subst(&cont, &active),
                )
            }
        },
        Term::Sum(bs) => Term::Sum(bs.iter().map(|b| apply_subst(b, s)).collect()),
        Term::Par(l, r) => Term::par(apply_subst(l, s), apply_subst(r, s)),
        Term::Nu(n, body) => {
            let active = s.without(&[n]);
            if active.is_identity() {
                return Term::Nu(n.clone(), body.clone());
            }
            let body_free = {
                let mut fns = free_names_with_holes_erased(body);
                fns.remove(n);
                fns
            };
            let effective_image: BTreeSet<Name> = active
                .map
                .iter()
                .filter(|(k, _)| body_free.contains(*k))
                .map(|(_, v)| v.clone())
                .collect();
            if effective_image.contains(n) {
                let mut avoid: BTreeSet<Name> = free_names_with_holes_erased(body);
                avoid.extend(effective_image);
                let fresh = Name::freshen(n, &avoid);
                let renamed = apply_subst(body, &Substitution::single(n.clone(), fresh.clone()));
                Term::Nu(fresh, Box::new(apply_subst(&renamed, &active)))
            } else {
                Term::Nu(n.clone(), Box::new(apply_subst(body, &active)))
            }
        }
        Term::RestrictSet(labels, body) => Term::RestrictSet(
            labels
                .iter()
                .map(|(n, lvl)| (s.apply_name(n), *lvl))
                .collect(),
            Box::new(apply_subst(body, s)),
        ),
        Term::Bang(body) => Term::Bang(Box::new(apply_subst(body, s))),
        Term::Match(l, r, body) => Term::Match(
            s.apply_name(l),
            s.apply_name(r),
            Box::new(apply_subst(body, s)),
        ),
        Term::Relabel(body, map) => Term::Relabel(
            Box::new(apply_subst(body, s)),
            map.iter()
                .map(|(k, v)| (s.apply_name(k), s.apply_name(v)))
                .collect(),
        ),
        Term::DefCall(id, args) => {
            Term::DefCall(id.clone(), args.iter().map(|a| s.apply_name(a)).collect())
        }
        Term::Theta(body) => Term::Theta(Box::new(apply_subst(body, s))),
        Term::Prioritize(body, n) => {
            Term::Prioritize(Box::new(apply_subst(body, s)), s.apply_name(n))
        }
        Term::Deprioritize(body, n) => {
            Term::Deprioritize(Box::new(apply_subst(body, s)), s.apply_name(n))
        }
        Term::Delimit(k, body) => Term::Delimit(k.clone(), Box::new(apply_subst(body, s))),
    }
}

fn subst_guard(g: &crate::term::GuardSet, s: &Substitution) -> crate::term::GuardSet {
    crate::term::GuardSet(g.0.iter().map(|n| s.apply_name(n)).collect())
}

struct Canonicalizer {
    counter: u32,
    names: Vec<(Name, Name)>,
    killers: Vec<(KillerLabel, KillerLabel)>,
}

impl Canonicalizer {
    fn bind_name(&mut self, n: &Name) -> Name {
        let fresh = Name::canonical(self.counter);
        self.counter += 1;
        self.names.push((n.clone(), fresh.clone()));
        fresh
    }

    fn bind_killer(&mut self, k: &KillerLabel) -> KillerLabel {
        let fresh = KillerLabel::new(format!("#{}", self.counter));
        self.counter += 1;
        self.killers.push((k.clone(), fresh.clone()));
        fresh
    }

    fn lookup_name(&self, n: &Name) -> Name {
        self.names
            .iter()
            .rev()
            .find(|(orig, _)| orig == n)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| n.clone())
    }

    fn lookup_killer(&self, k: &KillerLabel) -> KillerLabel {
        self.killers
            .iter()
            .rev()
            .find(|(orig, _)| orig == k)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| k.clone())
    }

    fn tuple(&self, t: &Tuple) -> Tuple {
        Tuple(t.0.iter().map(|n| self.lookup_name(n)).collect())
    }

    fn walk(&mut self, t: &Term) -> Term {
        match t {
            Term::Nil | Term::Hole(_) => t.clone(),
            Term::Prefix(act, cont) => match act {
                PrefixAction::Tau { guard } => {
                    let guard = crate::term::GuardSet(
                        guard.0.iter().map(|n| self.lookup_name(n)).collect(),
                    );
                    Term::prefix(PrefixAction::Tau { guard }, self.walk(cont))
                }
                PrefixAction::Act {
                    name,
                    polarity,
                    level,
                    guard,
                } => {
                    let act = PrefixAction::Act {
                        name: self.lookup_name(name),
                        polarity: *polarity,
                        level: *level,
                        guard: crate::term::GuardSet(
                            guard.0.iter().map(|n| self.lookup_name(n)).collect(),
                        ),
                    };
                    Term::prefix(act, self.walk(cont))
                }
                PrefixAction::Send { subject, payload } => Term::prefix(
                    PrefixAction::Send {
                        subject: self.tuple(subject),
                        payload: self.tuple(payload),
                    },
                    self.walk(cont),
                ),
                PrefixAction::Receive { subject, pattern } => {
                    let subject = self.tuple(subject);
                    let before = self.names.len();
                    let pattern = crate::term::Pattern(
                        pattern
                            .0
                            .iter()
                            .map(|it| match it {
                                PatternItem::Protected(n) => {
                                    PatternItem::Protected(self.lookup_name(n))
                                }
                                PatternItem::Placeholder(n) => {
                                    PatternItem::Placeholder(self.bind_name(n))
                                }
                            })
                            .collect(),
                    );
                    let cont = self.walk(cont);
                    self.names.truncate(before);
                    Term::prefix(PrefixAction::Receive { subject, pattern }, cont)
                }
            },
            Term::Sum(bs) => Term::Sum(bs.iter().map(|b| self.walk(b)).collect()),
            Term::Par(l, r) => {
                let l = self.walk(l);
                let r = self.walk(r);
                Term::par(l, r)
            }
            Term::Nu(n, body) => {
                let fresh = self.bind_name(n);
                let body = self.walk(body);
                self.names.pop();
                Term::Nu(fresh, Box::new(body))
            }
            Term::RestrictSet(labels, body) => Term::RestrictSet(
                labels
                    .iter()
                    .map(|(n, lvl)| (self.lookup_name(n), *lvl))
                    .collect(),
                Box::new(self.walk(body)),
            ),
            Term::Bang(body) => Term::Bang(Box::new(self.walk(body))),
            Term::Match(l, r, body) => Term::Match(
                self.lookup_name(l),
                self.lookup_name(r),
                Box::new(self.walk(body)),
            ),
            Term::Relabel(body, map) => {
                let map = map
                    .iter()
                    .map(|(k, v)| (self.lookup_name(k), self.lookup_name(v)))
                    .collect();
                Term::Relabel(Box::new(self.walk(body)), map)
            }
            Term::DefCall(id, args) => Term::DefCall(
                id.clone(),
                args.iter().map(|a| self.lookup_name(a)).collect(),
            ),
            Term::Theta(body) => Term::Theta(Box::new(self.walk(body))),
            Term::Prioritize(body, n) => {
                Term::Prioritize(Box::new(self.walk(body)), self.lookup_name(n))
            }
            Term::Deprioritize(body, n) => {
                Term::Deprioritize(Box::new(self.walk(body)), self.lookup_name(n))
            }
            Term::Kill(k) => Term::Kill(self.lookup_killer(k)),
            Term::Delimit(k, body) => {
                let fresh = self.bind_killer(k);
                let body = self.walk(body);
                self.killers.pop();
                Term::Delimit(fresh, Box::new(body))
            }
        }
    }
}

/// Rename every bound name (and bound killer label) to a canonical indexed
/// scheme in traversal order. Idempotent, preserves free names, and maps
/// alpha-equivalent terms to the same value — used for LTS state identity.
pub fn alpha_canonical(t: &Term) -> Term {
    let mut c = Canonicalizer {
        counter: 0,
        names: Vec::new(),
        killers: Vec::new(),
    };
    c.walk(t)
}

/// Alpha-equivalence via canonical forms.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    alpha_canonical(a) == alpha_canonical(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_unchecked;

    fn t(src: &str) -> Term {
        parse_unchecked(src).unwrap()
    }

    fn sub(pairs: &[(&str, &str)]) -> Substitution {
        Substitution::from_pairs(pairs.iter().map(|(a, b)| (Name::new(*a), Name::new(*b))))
    }

    #[test]
    fn subst_match_operands() {
        assert_eq!(
            apply_subst(&t("[a=b] y!<c>"), &sub(&[("a", "b")])),
            t("[b=b] y!<c>")
        );
    }

    #[test]
    fn subst_closed_is_identity() {
        let closed = t("(new z)(z!<z> | z?(w).0)");
        for s in [
            sub(&[("a", "b")]),
            sub(&[("z", "q")]),
            sub(&[("w", "v"), ("y", "z")]),
        ] {
            assert_eq!(apply_subst(&closed, &s), closed);
        }
    }

    #[test]
    fn subst_avoids_capture_under_nu() {
        // (new b) a!<b> {a -> b}: the binder must be renamed first.
        let got = apply_subst(&t("(new b) a!<b>"), &sub(&[("a", "b")]));
        let oracle = {
            // Manual route: alpha-rename the binder, then substitute naively.
            let renamed = t("(new b2) a!<b2>");
            apply_subst(&renamed, &sub(&[("a", "b")]))
        };
        assert!(alpha_eq(&got, &oracle), "got {got:?}");
        // The payload must still be the bound name, not the substituted b.
        match got {
            Term::Nu(fresh, body) => {
                assert_ne!(fresh, Name::new("b"));
                assert_eq!(
                    *body,
                    Term::prefix(
                        PrefixAction::Send {
                            subject: Tuple::single(Name::new("b")),
                            payload: Tuple::single(fresh),
                        },
                        Term::Nil
                    )
                );
            }
            other => panic!("expected Nu, got {other:?}"),
        }
    }

    #[test]
    fn subst_avoids_capture_under_pattern() {
        // x?(y).z!<y> {z -> y}: placeholder y must be renamed.
        let got = apply_subst(&t("x?(y).z!<y>"), &sub(&[("z", "y")]));
        assert!(alpha_eq(&got, &t("x?(w).y!<w>")), "got {got:?}");
    }

    #[test]
    fn subst_protected_names_are_free() {
        assert_eq!(
            apply_subst(&t("z?(@b).0"), &sub(&[("b", "c")])),
            t("z?(@c).0")
        );
    }

    #[test]
    fn subst_identity_alpha_equivalent() {
        let terms = [
            "(new x)(x?(a).[a=b] y!<c> | x!<b>)",
            "a.0 + tau.0",
            "[k](kill(k) | a!<n>)",
        ];
        for src in terms {
            let term = t(src);
            assert!(alpha_eq(
                &apply_subst(&term, &Substitution::identity()),
                &term
            ));
        }
    }

    #[test]
    fn canonical_single_binder() {
        let got = alpha_canonical(&t("(new z) z!<a>"));
        assert_eq!(
            got,
            Term::Nu(
                Name::canonical(0),
                Box::new(Term::prefix(
                    PrefixAction::Send {
                        subject: Tuple::single(Name::canonical(0)),
                        payload: Tuple::single(Name::new("a")),
                    },
                    Term::Nil
                ))
            )
        );
    }

    #[test]
    fn canonical_idempotent_and_alpha_invariant() {
        let u = t("(new u) u!<a>");
        let v = t("(new v) v!<a>");
        assert_eq!(alpha_canonical(&u), alpha_canonical(&v));
        assert_eq!(alpha_canonical(&alpha_canonical(&u)), alpha_canonical(&u));
    }

    #[test]
    fn canonical_preserves_free_names() {
        let term = t("(new x)(x?(a).[a=b] y!<c> | x!<b>)");
        assert_eq!(
            crate::term::free_names(&alpha_canonical(&term)).unwrap(),
            crate::term::free_names(&term).unwrap()
        );
    }

    #[test]
    fn canonical_killer_labels() {
        let a = alpha_canonical(&t("[k](kill(k) | a!<n>)"));
        let b = alpha_canonical(&t("[j](kill(j) | a!<n>)"));
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_shadowing() {
        let a = alpha_canonical(&t("x?(y).(new y) y!<y>"));
        let b = alpha_canonical(&t("x?(w).(new v) v!<v>"));
        assert_eq!(a, b);
    }
}
