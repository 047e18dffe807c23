// SPDX-License-Identifier: Apache-2.0

//! Landing gear system ground model and its baseline requirements.
//!
//! Shipped twice: as DSL sources (`corpus/*.asm`, `corpus/lgs.reqs`) and as
//! trees built in code. Tests keep the two in sync.

use crate::asm_exec::State;
use crate::spec_lang::{
    DomainId, EnumDomain, Expr, Model, PatternKind, Requirement, Rule, Term, ValueId, VarDecl,
    VarId, VarKind,
};

pub const LGS_FIXED_SRC: &str = include_str!("../corpus/lgs_fixed.asm");
pub const LGS_ORIGINAL_SRC: &str = include_str!("../corpus/lgs_original.asm");
pub const LGS_REQS_SRC: &str = include_str!("../corpus/lgs.reqs");

/// File names under which the corpus is exported.
pub const FILES: [(&str, &str); 3] = [
    ("lgs_fixed.asm", LGS_FIXED_SRC),
    ("lgs_original.asm", LGS_ORIGINAL_SRC),
    ("lgs.reqs", LGS_REQS_SRC),
];

pub const HANDLE: VarId = VarId(0);
pub const DOOR: VarId = VarId(1);
pub const GEAR: VarId = VarId(2);

const HANDLE_D: DomainId = DomainId(0);
const DOOR_D: DomainId = DomainId(1);
const GEAR_D: DomainId = DomainId(2);

pub mod handle {
    use crate::spec_lang::ValueId;
    pub const UP: ValueId = ValueId(0);
    pub const DOWN: ValueId = ValueId(1);
}

pub mod door {
    use crate::spec_lang::ValueId;
    pub const CLOSED: ValueId = ValueId(0);
    pub const OPENING: ValueId = ValueId(1);
    pub const OPEN: ValueId = ValueId(2);
    pub const CLOSING: ValueId = ValueId(3);
}

pub mod gear {
    use crate::spec_lang::ValueId;
    pub const RETRACTED: ValueId = ValueId(0);
    pub const EXTENDING: ValueId = ValueId(1);
    pub const EXTENDED: ValueId = ValueId(2);
    pub const RETRACTING: ValueId = ValueId(3);
}

/// Builds a state from (handle, door, gear) values.
pub fn state(h: ValueId, d: ValueId, g: ValueId) -> State {
    State::from_values(vec![h, d, g])
}

fn is(var: VarId, domain: DomainId, value: ValueId) -> Expr {
    Expr::Eq(Term::Var(var), Term::Const { domain, value })
}

fn is_not(var: VarId, domain: DomainId, value: ValueId) -> Expr {
    Expr::Neq(Term::Var(var), Term::Const { domain, value })
}

fn set(var: VarId, domain: DomainId, value: ValueId) -> Rule {
    Rule::Assign {
        target: var,
        value: Term::Const { domain, value },
    }
}

/// `if var = from then var := to end`
fn moves(var: VarId, domain: DomainId, from: ValueId, to: ValueId) -> Rule {
    Rule::cond(is(var, domain, from), set(var, domain, to), None)
}

fn door_moves(from: ValueId, to: ValueId) -> Rule {
    moves(DOOR, DOOR_D, from, to)
}

fn gear_moves(from: ValueId, to: ValueId) -> Rule {
    moves(GEAR, GEAR_D, from, to)
}

fn close_door() -> Rule {
    Rule::Par(vec![
        door_moves(door::OPEN, door::CLOSING),
        door_moves(door::CLOSING, door::CLOSED),
        door_moves(door::OPENING, door::CLOSING),
    ])
}

fn extend(with_opening_branch: bool) -> Rule {
    let mut door_branches = vec![door_moves(door::CLOSED, door::OPENING)];
    if with_opening_branch {
        door_branches.push(door_moves(door::OPENING, door::OPEN));
    }
    door_branches.push(door_moves(door::CLOSING, door::OPENING));
    door_branches.push(Rule::cond(
        is(DOOR, DOOR_D, door::OPEN),
        Rule::Par(vec![
            gear_moves(gear::RETRACTED, gear::EXTENDING),
            gear_moves(gear::EXTENDING, gear::EXTENDED),
            gear_moves(gear::RETRACTING, gear::EXTENDING),
        ]),
        None,
    ));
    Rule::cond(
        is_not(GEAR, GEAR_D, gear::EXTENDED),
        Rule::Par(door_branches),
        Some(close_door()),
    )
}

fn retract() -> Rule {
    Rule::cond(
        is_not(GEAR, GEAR_D, gear::RETRACTED),
        Rule::Par(vec![
            door_moves(door::CLOSED, door::OPENING),
            door_moves(door::OPENING, door::OPEN),
            door_moves(door::CLOSING, door::OPENING),
            Rule::cond(
                is(DOOR, DOOR_D, door::OPEN),
                Rule::Par(vec![
                    gear_moves(gear::EXTENDED, gear::RETRACTING),
                    gear_moves(gear::RETRACTING, gear::RETRACTED),
                    gear_moves(gear::EXTENDING, gear::RETRACTING),
                ]),
                None,
            ),
        ]),
        Some(close_door()),
    )
}

fn build(with_opening_branch: bool) -> Model {
    let domains = vec![
        EnumDomain::new("Handle", &["up", "down"]),
        EnumDomain::new("Door", &["closed", "opening", "open", "closing"]),
        EnumDomain::new("Gear", &["retracted", "extending", "extended", "retracting"]),
    ];
    let vars = vec![
        VarDecl {
            name: "handle".into(),
            domain: HANDLE_D,
            kind: VarKind::Monitored,
        },
        VarDecl {
            name: "door".into(),
            domain: DOOR_D,
            kind: VarKind::Controlled,
        },
        VarDecl {
            name: "gear".into(),
            domain: GEAR_D,
            kind: VarKind::Controlled,
        },
    ];
    let main = Rule::cond(
        is(HANDLE, HANDLE_D, handle::DOWN),
        extend(with_opening_branch),
        Some(retract()),
    );
    Model::new(
        domains,
        vars,
        vec![state(handle::DOWN, door::CLOSED, gear::EXTENDED)],
        main,
    )
    .expect("landing gear model is well-formed")
}

/// Ground model with complete extension and retraction sequences.
pub fn lgs_fixed() -> Model {
    build(true)
}

/// Ground model whose extension sequence never drives an opening door to open.
pub fn lgs_original() -> Model {
    build(false)
}

fn handle_is(v: ValueId) -> Expr {
    is(HANDLE, HANDLE_D, v)
}

fn distance(name: &str, k: u32, stimulus: Expr, goal: Expr) -> Requirement {
    // The released stimulus discharges the obligation.
    let response = Expr::or(Expr::not(stimulus.clone()), goal);
    Requirement::new(name, PatternKind::MaxDistance, stimulus, response, Some(k))
        .expect("valid requirement")
}

fn stability(name: &str, stimulus: Expr, response: Expr) -> Requirement {
    Requirement::new(name, PatternKind::ResponseStability, stimulus, response, None)
        .expect("valid requirement")
}

fn locked(g: ValueId) -> Expr {
    Expr::and(is(GEAR, GEAR_D, g), is(DOOR, DOOR_D, door::CLOSED))
}

/// r11_bis, r12_bis, r21, r22, r11_rs, r12_rs in that order.
pub fn lgs_requirements() -> Vec<Requirement> {
    vec![
        distance("r11_bis", 10, handle_is(handle::DOWN), locked(gear::EXTENDED)),
        distance("r12_bis", 10, handle_is(handle::UP), locked(gear::RETRACTED)),
        distance(
            "r21",
            1,
            handle_is(handle::DOWN),
            is_not(GEAR, GEAR_D, gear::RETRACTING),
        ),
        distance(
            "r22",
            1,
            handle_is(handle::UP),
            is_not(GEAR, GEAR_D, gear::EXTENDING),
        ),
        stability("r11_rs", handle_is(handle::DOWN), locked(gear::EXTENDED)),
        stability("r12_rs", handle_is(handle::UP), locked(gear::RETRACTED)),
    ]
}
