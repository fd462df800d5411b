use std::fmt;

use detection::Resolving;
use fock_core::{parse_spatial_label, spatial_label, Pol, AUX_OFFSET, PRIMED_OFFSET};
use optics_elements::{parse_angle, parse_ratio, ElementKind, ElementSpec};
use paper_circuits::{
    Acceptance, CircuitSpec, Condition, KrausKind, Predicate, Recycle, Source, Step, StepOp, TargetKind, TargetSpec,
};
use serde::Serialize;

/// Largest count accepted by `modes`, `primed` and `aux`.
pub const MAX_DECLARED: u32 = 99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {s}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Name(String),
    Modes(u32),
    Primed(u32),
    Aux(u32),
    Input(Source),
    Step(Step),
    Accept(Acceptance),
    Fix(ElementSpec),
    Target(TargetSpec),
    Finish(ElementSpec),
    Goal(TargetSpec),
    Recycle(TargetSpec),
    Restore(ElementSpec),
    Partition(Vec<u32>, Vec<u32>),
}

/// A parsed source file: statements with their line numbers, comments, and the assembled circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct DslProgram {
    pub statements: Vec<(usize, Statement)>,
    pub comments: Vec<(usize, String)>,
    pub circuit: CircuitSpec,
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

struct Err {
    col: usize,
    msg: String,
}

fn err<T>(col: usize, msg: impl Into<String>) -> Result<T, Err> {
    Err(Err { col, msg: msg.into() })
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut out = vec![];
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Tok { text: &line[s..i], col: line[..s].chars().count() + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn mode(t: Tok) -> Result<u32, Err> {
    match parse_spatial_label(t.text) {
        Some(m) if m != 0 && m != PRIMED_OFFSET && m != AUX_OFFSET => Ok(m),
        _ => err(t.col, format!("expected a mode label, found {:?}", t.text)),
    }
}

fn modes(ts: &[Tok]) -> Result<Vec<(u32, usize)>, Err> {
    ts.iter().map(|&t| mode(t).map(|m| (m, t.col))).collect()
}

fn arity(head: Tok, args: &[Tok], n: usize) -> Result<(), Err> {
    if args.len() != n {
        return err(head.col, format!("`{}` takes {n} argument(s), found {}", head.text, args.len()));
    }
    Ok(())
}

fn count(head: Tok, args: &[Tok]) -> Result<u32, Err> {
    arity(head, args, 1)?;
    match args[0].text.parse::<u32>() {
        Ok(n) if n <= MAX_DECLARED => Ok(n),
        _ => err(args[0].col, format!("expected a count between 0 and {MAX_DECLARED}")),
    }
}

fn element(head: Tok, args: &[Tok]) -> Result<Option<(ElementSpec, Vec<(u32, usize)>)>, Err> {
    let (kind, rest) = match head.text {
        "bs" | "rot" | "phase" => {
            let Some(p) = args.first() else {
                return err(head.col, format!("`{}` needs a parameter", head.text));
            };
            let kind = match head.text {
                "bs" => match parse_ratio(p.text) {
                    Some(r) if (0.0..=1.0).contains(&r) => ElementKind::BeamSplitter { r_sq: r },
                    _ => return err(p.col, format!("expected a reflectivity in [0, 1], found {:?}", p.text)),
                },
                k => {
                    let Some(a) = parse_angle(p.text) else {
                        return err(p.col, format!("expected an angle, found {:?}", p.text));
                    };
                    if k == "rot" {
                        ElementKind::PolarizationRotator { theta: a }
                    } else {
                        ElementKind::PhaseShifter { phi: a }
                    }
                }
            };
            (kind, &args[1..])
        }
        "pbs" => (ElementKind::Pbs, args),
        "fourport" => (ElementKind::FourPort, args),
        _ => return Ok(None),
    };
    arity(head, rest, kind.arity()).map_err(|e| Err { msg: format!("{} (mode count)", e.msg), ..e })?;
    let ms = modes(rest)?;
    let spec = ElementSpec::new(kind, ms.iter().map(|x| x.0).collect()).or_else(|e| err(head.col, e.to_string()))?;
    Ok(Some((spec, ms)))
}

fn target(head: Tok, args: &[Tok]) -> Result<(TargetSpec, Vec<(u32, usize)>), Err> {
    let Some(k) = args.first() else { return err(head.col, format!("`{}` needs a state kind", head.text)) };
    let Some(kind) = TargetKind::from_keyword(k.text) else {
        return err(k.col, format!("unknown state {:?}", k.text));
    };
    let ms = modes(&args[1..])?;
    let t = TargetSpec::new(kind, ms.iter().map(|x| x.0).collect()).or_else(|e| err(head.col, e.to_string()))?;
    Ok((t, ms))
}

fn input(head: Tok, args: &[Tok]) -> Result<(Source, Vec<(u32, usize)>), Err> {
    let Some(k) = args.first() else { return err(head.col, "`input` needs a source kind") };
    let rest = &args[1..];
    if k.text == "sp" {
        if rest.is_empty() {
            return err(k.col, "`sp` needs at least one mode");
        }
        let mut ms = vec![];
        let mut sp = vec![];
        for &t in rest {
            let (m, p) = match t.text.strip_suffix(":V") {
                Some(m) => (m, Pol::V),
                None => (t.text.strip_suffix(":H").unwrap_or(t.text), Pol::H),
            };
            let m = mode(Tok { text: m, col: t.col })?;
            ms.push((m, t.col));
            sp.push((m, p));
        }
        return Ok((Source::Sp(sp), ms));
    }
    let want = match k.text {
        "bell" => Some(2),
        "ghz3" => Some(3),
        "ghz4" | "hes" => Some(4),
        "qdc3" => Some(6),
        "vac" => None,
        _ => return err(k.col, format!("unknown source {:?}", k.text)),
    };
    if let Some(n) = want {
        if rest.len() != n {
            return err(k.col, format!("`{}` takes {n} modes, found {}", k.text, rest.len()));
        }
    } else if rest.is_empty() {
        return err(k.col, "`vac` needs at least one mode");
    }
    let ms = modes(rest)?;
    let m: Vec<u32> = ms.iter().map(|x| x.0).collect();
    let s = match k.text {
        "bell" => Source::Bell(m[0], m[1]),
        "ghz3" | "ghz4" => Source::Ghz(m),
        "hes" => Source::Hes([m[0], m[1], m[2], m[3]]),
        "qdc3" => Source::Qdc3([m[0], m[1], m[2], m[3], m[4], m[5]]),
        _ => Source::Vac(m),
    };
    Ok((s, ms))
}

fn predicate(head: Tok, args: &[Tok]) -> Result<(Predicate, Vec<(u32, usize)>), Err> {
    let Some(k) = args.first() else { return err(head.col, "`accept` needs a predicate") };
    let ms = modes(&args[1..])?;
    let m: Vec<u32> = ms.iter().map(|x| x.0).collect();
    let need = |ok: bool, what: &str| if ok { Ok(()) } else { err(k.col, format!("`{}` takes {what}", k.text)) };
    let p = match k.text {
        "pol_pair" => {
            need(!m.is_empty() && m.len() % 2 == 0, "mode pairs")?;
            Predicate::PolPair(m.chunks(2).map(|c| (c[0], c[1])).collect())
        }
        "two_distinct" => Predicate::TwoDistinct(m),
        "one_each" => Predicate::OneEach(m),
        "single_photon" => Predicate::SinglePhoton(m),
        "vacuum" => Predicate::Vacuum(m),
        "hv_pair" => Predicate::HvPair(m),
        "type2" | "phi_plus" => {
            need(m.len() == 2, "2 modes")?;
            if k.text == "type2" {
                Predicate::Type2(m[0], m[1])
            } else {
                Predicate::PhiPlus(m[0], m[1])
            }
        }
        "correctable" => {
            need(m.is_empty(), "no modes")?;
            Predicate::Correctable
        }
        _ => return err(k.col, format!("unknown predicate {:?}", k.text)),
    };
    if !matches!(p, Predicate::Correctable) && ms.is_empty() {
        return err(k.col, format!("`{}` needs modes", k.text));
    }
    Ok((p, ms))
}

/// One statement, with the modes it references and their columns.
fn statement(toks: &[Tok], allow_when: bool) -> Result<(Statement, Vec<(u32, usize)>), Err> {
    let head = toks[0];
    let args = &toks[1..];
    let el_stmt = |f: fn(ElementSpec) -> Statement| -> Result<(Statement, Vec<(u32, usize)>), Err> {
        let Some(h) = args.first() else { return err(head.col, format!("`{}` needs an element", head.text)) };
        match element(*h, &args[1..])? {
            Some((e, ms)) => Ok((f(e), ms)),
            None => err(h.col, format!("expected an element, found {:?}", h.text)),
        }
    };
    let step = |op: StepOp, ms| Ok((Statement::Step(Step { when: None, op }), ms));
    match head.text {
        "name" => {
            if args.is_empty() {
                return err(head.col, "`name` needs a value");
            }
            let v: Vec<&str> = args.iter().map(|t| t.text).collect();
            Ok((Statement::Name(v.join(" ")), vec![]))
        }
        "modes" => Ok((Statement::Modes(count(head, args)?), vec![])),
        "primed" => Ok((Statement::Primed(count(head, args)?), vec![])),
        "aux" => Ok((Statement::Aux(count(head, args)?), vec![])),
        "input" => input(head, args).map(|(s, m)| (Statement::Input(s), m)),
        "qf" | "mqf" => {
            arity(head, args, 2)?;
            let ms = modes(args)?;
            if ms[0].0 == ms[1].0 {
                return err(args[1].col, "repeated mode");
            }
            let kind = if head.text == "qf" { KrausKind::Qf } else { KrausKind::Mqf };
            step(StepOp::Kraus { kind, i: ms[0].0, j: ms[1].0 }, ms)
        }
        "detect" => {
            let Some(r) = args.first() else { return err(head.col, "`detect` needs number or pol") };
            let resolving = match r.text {
                "number" => Resolving::NumberOnly,
                "pol" => Resolving::PolarizationResolving,
                _ => return err(r.col, format!("expected number or pol, found {:?}", r.text)),
            };
            if args.len() < 2 {
                return err(r.col, "`detect` needs at least one mode");
            }
            let ms = modes(&args[1..])?;
            step(StepOp::Detect { resolving, modes: ms.iter().map(|x| x.0).collect() }, ms)
        }
        "accept" => predicate(head, args).map(|(p, m)| (Statement::Accept(Acceptance { when: None, predicate: p }), m)),
        "when" => {
            if !allow_when {
                return err(head.col, "nested `when`");
            }
            if args.len() < 2 {
                return err(head.col, "`when` needs a condition and a statement");
            }
            let c = Condition::parse(args[0].text).or_else(|e| err(args[0].col, e.to_string()))?;
            let (s, mut ms) = statement(&args[1..], false)?;
            ms.extend(c.modes().into_iter().map(|m| (m, args[0].col)));
            match s {
                Statement::Step(mut st) => {
                    st.when = Some(c);
                    Ok((Statement::Step(st), ms))
                }
                Statement::Accept(mut a) => {
                    a.when = Some(c);
                    Ok((Statement::Accept(a), ms))
                }
                _ => err(args[1].col, format!("`{}` cannot be conditional", args[1].text)),
            }
        }
        "fix" => el_stmt(Statement::Fix),
        "finish" => el_stmt(Statement::Finish),
        "restore" => el_stmt(Statement::Restore),
        "target" => target(head, args).map(|(t, m)| (Statement::Target(t), m)),
        "goal" => target(head, args).map(|(t, m)| (Statement::Goal(t), m)),
        "recycle" => target(head, args).map(|(t, m)| (Statement::Recycle(t), m)),
        "partition" => {
            let Some(bar) = args.iter().position(|t| t.text == "|") else {
                return err(head.col, "`partition` needs `|` between the two sides");
            };
            let a = modes(&args[..bar])?;
            let b = modes(&args[bar + 1..])?;
            if a.is_empty() || b.is_empty() {
                return err(args[bar].col, "empty side in partition");
            }
            let ms = a.iter().chain(&b).copied().collect();
            Ok((Statement::Partition(a.iter().map(|x| x.0).collect(), b.iter().map(|x| x.0).collect()), ms))
        }
        _ => match element(head, args)? {
            Some((e, ms)) => step(StepOp::Element(e), ms),
            None => err(head.col, format!("unknown statement {:?}", head.text)),
        },
    }
}

fn declared_ok(m: u32, d: &paper_circuits::Declared) -> bool {
    if m >= AUX_OFFSET {
        m - AUX_OFFSET <= d.aux
    } else if m >= PRIMED_OFFSET {
        m - PRIMED_OFFSET <= d.primed
    } else {
        m <= d.modes
    }
}

/// Parse a circuit source. Errors are collected line by line; any error fails the parse.
pub fn parse(text: &str) -> Result<DslProgram, Vec<Diagnostic>> {
    let mut diags = vec![];
    let mut statements = vec![];
    let mut comments = vec![];
    let mut refs = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = match raw.find('#') {
            Some(p) => {
                comments.push((line, raw[p + 1..].trim().to_string()));
                &raw[..p]
            }
            None => raw,
        };
        let toks = tokenize(body);
        if toks.is_empty() {
            continue;
        }
        match statement(&toks, true) {
            Ok((s, ms)) => {
                refs.push((line, ms));
                statements.push((line, s));
            }
            Err(e) => diags.push(Diagnostic { line, column: e.col, message: e.msg, severity: Severity::Error }),
        }
    }
    let mut c = CircuitSpec::default();
    let mut seen_name = None;
    let mut restore_lines = vec![];
    for (line, s) in &statements {
        let dup = |what: &str| Diagnostic {
            line: *line,
            column: 1,
            message: format!("repeated `{what}`"),
            severity: Severity::Error,
        };
        match s {
            Statement::Name(n) => {
                if seen_name.is_some() {
                    diags.push(dup("name"));
                }
                seen_name = Some(*line);
                c.name = n.clone();
            }
            Statement::Modes(n) => c.declared.modes = *n,
            Statement::Primed(n) => c.declared.primed = *n,
            Statement::Aux(n) => c.declared.aux = *n,
            Statement::Input(x) => c.inputs.push(x.clone()),
            Statement::Step(x) => c.steps.push(x.clone()),
            Statement::Accept(x) => c.accept.push(x.clone()),
            Statement::Fix(e) => c.fix.push(e.clone()),
            Statement::Finish(e) => c.finish.push(e.clone()),
            Statement::Restore(e) => restore_lines.push((*line, e.clone())),
            Statement::Target(t) => {
                if c.target.replace(t.clone()).is_some() {
                    diags.push(dup("target"));
                }
            }
            Statement::Goal(t) => {
                if c.goal.replace(t.clone()).is_some() {
                    diags.push(dup("goal"));
                }
            }
            Statement::Recycle(t) => {
                if c.recycle.replace(Recycle { target: t.clone(), restore: vec![] }).is_some() {
                    diags.push(dup("recycle"));
                }
            }
            Statement::Partition(a, b) => {
                if c.partition.replace((a.clone(), b.clone())).is_some() {
                    diags.push(dup("partition"));
                }
            }
        }
    }
    for (line, e) in restore_lines {
        match &mut c.recycle {
            Some(r) => r.restore.push(e),
            None => diags.push(Diagnostic {
                line,
                column: 1,
                message: "`restore` without `recycle`".into(),
                severity: Severity::Error,
            }),
        }
    }
    for (line, ms) in refs {
        for (m, col) in ms {
            if !declared_ok(m, &c.declared) {
                diags.push(Diagnostic {
                    line,
                    column: col,
                    message: format!("undeclared mode {}", spatial_label(m)),
                    severity: Severity::Error,
                });
            }
        }
    }
    if diags.is_empty() {
        if let Err(e) = c.validate() {
            let line = statements.last().map_or(1, |x| x.0);
            diags.push(Diagnostic { line, column: 1, message: e.to_string(), severity: Severity::Error });
        }
    }
    if diags.is_empty() {
        Ok(DslProgram { statements, comments, circuit: c })
    } else {
        diags.sort_by_key(|d| (d.line, d.column));
        Err(diags)
    }
}

/// Source text for a circuit; `parse(&print(c))` reproduces `c`.
pub fn print(c: &CircuitSpec) -> String {
    let mut out = vec![];
    if !c.name.is_empty() {
        out.push(format!("name {}", c.name));
    }
    out.push(format!("modes {}", c.declared.modes));
    if c.declared.primed > 0 {
        out.push(format!("primed {}", c.declared.primed));
    }
    if c.declared.aux > 0 {
        out.push(format!("aux {}", c.declared.aux));
    }
    out.extend(c.inputs.iter().map(|s| s.to_string()));
    for st in &c.steps {
        out.push(match &st.when {
            Some(w) => format!("when {w} {}", st.op),
            None => st.op.to_string(),
        });
    }
    for a in &c.accept {
        out.push(match &a.when {
            Some(w) => format!("when {w} accept {}", a.predicate),
            None => format!("accept {}", a.predicate),
        });
    }
    out.extend(c.fix.iter().map(|e| format!("fix {e}")));
    if let Some(t) = &c.target {
        out.push(format!("target {t}"));
    }
    out.extend(c.finish.iter().map(|e| format!("finish {e}")));
    if let Some(t) = &c.goal {
        out.push(format!("goal {t}"));
    }
    if let Some(r) = &c.recycle {
        out.push(format!("recycle {}", r.target));
        out.extend(r.restore.iter().map(|e| format!("restore {e}")));
    }
    if let Some((a, b)) = &c.partition {
        let l = |v: &[u32]| v.iter().map(|&m| spatial_label(m)).collect::<Vec<_>>().join(" ");
        out.push(format!("partition {} | {}", l(a), l(b)));
    }
    let mut s = out.join("\n");
    s.push('\n');
    s
}
