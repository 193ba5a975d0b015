//! The rule catalogue. Grouped rules with several conclusions are split into
//! one schema per conclusion.

use std::fmt;
use std::str::FromStr;

use super::schema::*;
use super::KernelError;
use crate::term::Decoration::{Catcher, Propagator, Pure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleGroup {
    Monadic1,
    Monadic2,
    EmptyType,
    CaseDistinction,
    Propagate,
    Tagging,
    Untagging,
    /// Leaves discharged against the signature or by a kernel call.
    Signature,
    /// Definitional unfolding of `throw` and `try`.
    Definitions,
}

macro_rules! rules {
    ($( $variant:ident => $name:literal, $group:ident; )*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum RuleName {
            $( $variant, )*
        }

        impl RuleName {
            pub const ALL: &'static [RuleName] = &[ $( RuleName::$variant, )* ];

            /// Name used in proof scripts.
            pub fn name(self) -> &'static str {
                match self {
                    $( RuleName::$variant => $name, )*
                }
            }

            pub fn group(self) -> RuleGroup {
                match self {
                    $( RuleName::$variant => RuleGroup::$group, )*
                }
            }
        }

        impl FromStr for RuleName {
            type Err = KernelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $( $name => Ok(RuleName::$variant), )*
                    _ => Err(KernelError::UnknownRule(s.to_string())),
                }
            }
        }
    };
}

rules! {
    Comp => "comp", Monadic1;
    IdType => "id", Monadic1;
    Refl => "refl", Monadic1;
    Sym => "sym", Monadic1;
    Trans => "trans", Monadic1;
    Subst => "subst", Monadic1;
    Repl => "repl", Monadic1;
    Assoc => "assoc", Monadic1;
    UnitRight => "unit_right", Monadic1;
    UnitLeft => "unit_left", Monadic1;

    PureToPpg => "pure_ppg", Monadic2;
    PpgToCtc => "ppg_ctc", Monadic2;
    IdPure => "id_pure", Monadic2;
    PureComp => "pure_comp", Monadic2;
    PpgComp => "ppg_comp", Monadic2;
    PpgWeakToStrong => "ppg_strong", Monadic2;
    StrongToWeak => "strong_weak", Monadic2;
    WeakRefl => "wrefl", Monadic2;
    WeakSym => "wsym", Monadic2;
    WeakTrans => "wtrans", Monadic2;
    WeakSubst => "wsubst", Monadic2;
    WeakRepl => "wrepl", Monadic2;

    Empty => "empty", EmptyType;
    EmptyPure => "empty_pure", EmptyType;
    EmptyUnique => "empty_unique", EmptyType;

    Copair => "copair", CaseDistinction;
    CopairCtc => "copair_ctc", CaseDistinction;
    CopairWeak => "copair_weak", CaseDistinction;
    CopairEmpty => "copair_empty", CaseDistinction;
    CopairUnique => "copair_unique", CaseDistinction;

    Downcast => "downcast", Propagate;
    DowncastPpg => "downcast_ppg", Propagate;
    DowncastWeak => "downcast_weak", Propagate;

    Tag => "tag", Tagging;
    TagPpg => "tag_ppg", Tagging;
    TagCase => "case", Tagging;
    TagCaseCtc => "case_ctc", Tagging;
    TagCaseWeak => "case_weak", Tagging;
    TagUnique => "tag_unique", Tagging;

    Untag => "untag", Untagging;
    UntagCtc => "untag_ctc", Untagging;
    UntagTag => "untag_tag", Untagging;
    UntagOther => "untag_other", Untagging;
    UntagCast => "untag_cast", Untagging;

    TypeDecl => "type", Signature;
    ExcDecl => "exc", Signature;
    Typecheck => "typecheck", Signature;
    Infer => "infer", Signature;

    ThrowDef => "throw_def", Definitions;
    TryDef => "try_def", Definitions;
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn one(j: JudgmentPat) -> PremisePat {
    PremisePat::One(j)
}

fn schema(premises: Vec<JudgmentPat>, conclusion: JudgmentPat) -> Schema {
    Schema {
        premises: premises.into_iter().map(one).collect(),
        conclusion,
        side: vec![],
    }
}

fn with_side(mut s: Schema, side: Vec<SideCondition>) -> Schema {
    s.side = side;
    s
}

impl RuleName {
    /// Whether the rule is discharged by a call into the term checker rather
    /// than by a rule of the logic.
    pub fn is_kernel_call(self) -> bool {
        matches!(self, RuleName::Typecheck | RuleName::Infer)
    }

    pub fn schema(self) -> Schema {
        use RuleName::*;
        let (f, g, h, k) = (mv("f"), mv("g"), mv("h"), mv("k"));
        let (x, y, z, w) = (tv("X"), tv("Y"), tv("Z"), tv("W"));
        let zero = TyPat::Zero;
        let copair_premises = || {
            vec![
                has_type(mv("g"), tv("X"), tv("Y")),
                deco(mv("g"), Propagator),
                has_type(mv("k"), TyPat::Zero, tv("Y")),
                deco(mv("k"), Catcher),
            ]
        };
        let copair_term = || TermPat::Copair(Box::new(mv("g")), Box::new(mv("k")));
        let downcast_premises = || vec![has_type(mv("k"), tv("X"), tv("Y")), deco(mv("k"), Catcher)];
        let downcast_term = || TermPat::Downcast(Box::new(mv("k")));
        let case_schema = |conclusion| Schema {
            premises: vec![PremisePat::PerException(
                "E",
                vec![
                    has_type(TermPat::Branch("F", tv("E")), tv("E"), tv("Y")),
                    deco(TermPat::Branch("F", tv("E")), Propagator),
                ],
            )],
            conclusion,
            side: vec![],
        };
        let untag_tag = |t: TermPat| comp(TermPat::Untag(tv("T")), t);

        match self {
            Comp => schema(
                vec![has_type(f.clone(), x.clone(), y.clone()), has_type(g.clone(), y, z.clone())],
                has_type(comp(g, f), x, z),
            ),
            IdType => schema(vec![is_type(x.clone())], has_type(TermPat::Id(x.clone()), x.clone(), x)),
            Refl => with_side(schema(vec![], strong(f.clone(), f)), vec![SideCondition::WellFormed("f")]),
            Sym => schema(vec![strong(f.clone(), g.clone())], strong(g, f)),
            Trans => schema(vec![strong(f.clone(), g.clone()), strong(g, h.clone())], strong(f, h)),
            Subst => schema(
                vec![has_type(f.clone(), x, y), strong(mv("g1"), mv("g2"))],
                strong(comp(mv("g1"), f.clone()), comp(mv("g2"), f)),
            ),
            Repl => schema(
                vec![strong(mv("f1"), mv("f2")), has_type(g.clone(), y, z)],
                strong(comp(g.clone(), mv("f1")), comp(g, mv("f2"))),
            ),
            Assoc => schema(
                vec![
                    has_type(f.clone(), x, y.clone()),
                    has_type(g.clone(), y, z.clone()),
                    has_type(h.clone(), z, w),
                ],
                strong(comp(h.clone(), comp(g.clone(), f.clone())), comp(comp(h, g), f)),
            ),
            UnitRight => schema(
                vec![has_type(f.clone(), x.clone(), y)],
                strong(comp(f.clone(), TermPat::Id(x)), f),
            ),
            UnitLeft => schema(
                vec![has_type(f.clone(), x, y.clone())],
                strong(comp(TermPat::Id(y), f.clone()), f),
            ),

            PureToPpg => schema(vec![deco(f.clone(), Pure)], deco(f, Propagator)),
            PpgToCtc => schema(vec![deco(f.clone(), Propagator)], deco(f, Catcher)),
            IdPure => schema(vec![is_type(x.clone())], deco(TermPat::Id(x), Pure)),
            PureComp => schema(
                vec![deco(f.clone(), Pure), deco(g.clone(), Pure)],
                deco(comp(g, f), Pure),
            ),
            PpgComp => schema(
                vec![deco(f.clone(), Propagator), deco(g.clone(), Propagator)],
                deco(comp(g, f), Propagator),
            ),
            PpgWeakToStrong => schema(
                vec![weak(f.clone(), g.clone()), deco(f.clone(), Propagator), deco(g.clone(), Propagator)],
                strong(f, g),
            ),
            StrongToWeak => schema(vec![strong(f.clone(), g.clone())], weak(f, g)),
            WeakRefl => with_side(schema(vec![], weak(f.clone(), f)), vec![SideCondition::WellFormed("f")]),
            WeakSym => schema(vec![weak(f.clone(), g.clone())], weak(g, f)),
            WeakTrans => schema(vec![weak(f.clone(), g.clone()), weak(g, h.clone())], weak(f, h)),
            WeakSubst => schema(
                vec![
                    has_type(f.clone(), x, y),
                    deco(f.clone(), Pure),
                    weak(mv("g1"), mv("g2")),
                ],
                weak(comp(mv("g1"), f.clone()), comp(mv("g2"), f)),
            ),
            WeakRepl => schema(
                vec![weak(mv("f1"), mv("f2")), has_type(g.clone(), y, z)],
                weak(comp(g.clone(), mv("f1")), comp(g, mv("f2"))),
            ),

            Empty => schema(vec![is_type(x.clone())], has_type(TermPat::Empty(x.clone()), zero, x)),
            EmptyPure => schema(vec![is_type(x.clone())], deco(TermPat::Empty(x), Pure)),
            EmptyUnique => schema(
                vec![has_type(f.clone(), zero.clone(), y.clone()), has_type(g.clone(), zero, y)],
                weak(f, g),
            ),

            Copair => schema(copair_premises(), has_type(copair_term(), x, y)),
            CopairCtc => schema(copair_premises(), deco(copair_term(), Catcher)),
            CopairWeak => schema(copair_premises(), weak(copair_term(), g)),
            CopairEmpty => schema(
                copair_premises(),
                strong(comp(copair_term(), TermPat::Empty(x)), k),
            ),
            CopairUnique => schema(
                vec![
                    has_type(f.clone(), x.clone(), y.clone()),
                    has_type(g.clone(), x.clone(), y),
                    weak(f.clone(), g.clone()),
                    strong(comp(f.clone(), TermPat::Empty(x.clone())), comp(g.clone(), TermPat::Empty(x))),
                ],
                strong(f, g),
            ),

            Downcast => schema(downcast_premises(), has_type(downcast_term(), x, y)),
            DowncastPpg => schema(downcast_premises(), deco(downcast_term(), Propagator)),
            DowncastWeak => schema(downcast_premises(), weak(downcast_term(), k)),

            Tag => schema(
                vec![is_exc(tv("T"))],
                has_type(TermPat::Tag(tv("T")), tv("T"), zero),
            ),
            TagPpg => schema(vec![is_exc(tv("T"))], deco(TermPat::Tag(tv("T")), Propagator)),
            TagCase => case_schema(has_type(TermPat::Case("F"), zero, y)),
            TagCaseCtc => case_schema(deco(TermPat::Case("F"), Catcher)),
            TagCaseWeak => case_schema(weak(
                comp(TermPat::Case("F"), TermPat::Tag(tv("T"))),
                TermPat::Branch("F", tv("T")),
            )),
            TagUnique => Schema {
                premises: vec![
                    one(has_type(f.clone(), zero.clone(), y.clone())),
                    one(has_type(g.clone(), zero, y)),
                    PremisePat::PerException(
                        "E",
                        vec![weak(
                            comp(f.clone(), TermPat::Tag(tv("E"))),
                            comp(g.clone(), TermPat::Tag(tv("E"))),
                        )],
                    ),
                ],
                conclusion: strong(f, g),
                side: vec![],
            },

            Untag => schema(
                vec![is_exc(tv("T"))],
                has_type(TermPat::Untag(tv("T")), zero, tv("T")),
            ),
            UntagCtc => schema(vec![is_exc(tv("T"))], deco(TermPat::Untag(tv("T")), Catcher)),
            UntagTag => schema(
                vec![is_exc(tv("T"))],
                weak(untag_tag(TermPat::Tag(tv("T"))), TermPat::Id(tv("T"))),
            ),
            UntagOther => with_side(
                schema(
                    vec![is_exc(tv("R")), is_exc(tv("T"))],
                    weak(
                        untag_tag(TermPat::Tag(tv("R"))),
                        comp(TermPat::Empty(tv("T")), TermPat::Tag(tv("R"))),
                    ),
                ),
                vec![
                    SideCondition::Distinct(tv("R"), tv("T")),
                    SideCondition::NotSubtype(tv("R"), tv("T")),
                ],
            ),
            UntagCast => with_side(
                schema(
                    vec![is_exc(tv("R")), is_exc(tv("T"))],
                    weak(untag_tag(TermPat::Tag(tv("R"))), TermPat::Cast(tv("R"), tv("T"))),
                ),
                vec![SideCondition::Hierarchy, SideCondition::Subtype(tv("R"), tv("T"))],
            ),

            TypeDecl => with_side(schema(vec![], is_type(x.clone())), vec![SideCondition::Declared(x)]),
            ExcDecl => with_side(
                schema(vec![], is_exc(tv("T"))),
                vec![SideCondition::Exceptional(tv("T"))],
            ),
            Typecheck => with_side(
                schema(vec![], has_type(f, x.clone(), y.clone())),
                vec![SideCondition::HasArity("f", x, y)],
            ),
            Infer => with_side(
                schema(vec![], JudgmentPat::Deco(f, DecoPat::Var("d"))),
                vec![SideCondition::InferredAtMost("f", DecoPat::Var("d"))],
            ),

            ThrowDef => schema(
                vec![is_exc(tv("T")), is_type(y.clone())],
                strong(
                    TermPat::Throw(tv("T"), y.clone()),
                    comp(TermPat::Empty(y), TermPat::Tag(tv("T"))),
                ),
            ),
            TryDef => with_side(
                schema(vec![], strong(TermPat::Try("l"), mv("r"))),
                vec![SideCondition::ElaboratesTo("l", "r")],
            ),
        }
    }
}
