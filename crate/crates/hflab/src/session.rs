//! Command dispatch over the library: a session holds defaults (universe,
//! theta mode, k ceiling, budget, output format) plus term bindings and one
//! loaded category. Every command renders deterministically in both the
//! human text form and the line-delimited doc form, and reports a status
//! that maps onto the process exit code.

use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::cat::{
    classify_category, encode_category, validate_category, FinCat, SizeFlag, SizeVerdict,
};
use crate::encode::{kpair, quotient_star, star_pair, star_unpair, theta, EquivRelation, ThetaMode};
use crate::error::Error;
use crate::hierarchy::{least_k, psi_member, ClassSpec};
use crate::presheaf::{probe_battery, yoneda_check, YonedaReport};
use crate::session::fileformat::{parse_catfile, parse_wpfile, LoadedCat};
use crate::set::{ack_decode, ack_encode, powerset, SetTerm};
use crate::subobj::{classifier_check, subs_star, validate_well_powering, MonoLikeSubcat};
use crate::term::{Bindings, Cursor};
use crate::universe::{check_universe_axioms, UniverseSpec};

pub mod fileformat;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Format {
    Text,
    Doc,
}

/// Worst-of over a run decides the exit code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Status {
    Ok,
    Verification,
    Usage,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Verification => 1,
            Status::Usage => 2,
        }
    }
}

pub struct Session {
    pub universe: UniverseSpec,
    pub theta: ThetaMode,
    pub max_k: u32,
    pub budget: Budget,
    pub format: Format,
    pub bindings: Bindings,
    pub current: Option<LoadedCat>,
    /// Relative file arguments resolve against this directory.
    pub base_dir: PathBuf,
}

impl Session {
    pub fn new(base_dir: PathBuf) -> Self {
        Session {
            universe: UniverseSpec::HF,
            theta: ThetaMode::Scott,
            max_k: 4,
            budget: Budget::default(),
            format: Format::Text,
            bindings: Bindings::new(),
            current: None,
            base_dir,
        }
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub struct Outcome {
    pub text: String,
    pub status: Status,
}

pub fn parse_universe(s: &str) -> Result<UniverseSpec, Error> {
    if s == "HF" {
        return Ok(UniverseSpec::HF);
    }
    if let Some(n) = s.strip_prefix('V') {
        if !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) {
            let n: u32 = n
                .parse()
                .map_err(|_| Error::Usage(format!("stage index out of range in '{}'", s)))?;
            return Ok(UniverseSpec::Vn(n));
        }
    }
    Err(Error::Usage(format!("unknown universe '{}', expected HF or V<n>", s)))
}

pub fn parse_theta_mode(s: &str) -> Result<ThetaMode, Error> {
    match s {
        "scott" => Ok(ThetaMode::Scott),
        "choice" => Ok(ThetaMode::Choice),
        other => Err(Error::Usage(format!("unknown theta mode '{}'", other))),
    }
}

pub fn parse_format(s: &str) -> Result<Format, Error> {
    match s {
        "text" => Ok(Format::Text),
        "doc" => Ok(Format::Doc),
        other => Err(Error::Usage(format!("unknown format '{}'", other))),
    }
}

fn theta_name(m: ThetaMode) -> &'static str {
    match m {
        ThetaMode::Scott => "scott",
        ThetaMode::Choice => "choice",
    }
}

// ---- Flags ---- //

#[derive(Default)]
struct Flags {
    universe: Option<UniverseSpec>,
    theta: Option<ThetaMode>,
    max_k: Option<u32>,
    budget: Option<u64>,
    c: Option<SetTerm>,
    k: Option<u32>,
    classes: Option<SetTerm>,
}

/// Settings a single command runs under: session defaults with the
/// command's own flags layered on top.
struct Eff {
    universe: UniverseSpec,
    theta: ThetaMode,
    max_k: u32,
    budget: Budget,
}

impl Flags {
    fn eff(&self, s: &Session) -> Eff {
        Eff {
            universe: self.universe.unwrap_or(s.universe),
            theta: self.theta.unwrap_or(s.theta),
            max_k: self.max_k.unwrap_or(s.max_k),
            budget: self.budget.map(Budget::with_cap).unwrap_or_else(|| s.budget.clone()),
        }
    }
}

fn flag_value<'a>(cur: &mut Cursor<'a>, name: &str) -> Result<&'a str, Error> {
    cur.lex_word().ok_or_else(|| Error::Usage(format!("flag {} needs a value", name)))
}

fn parse_u32(s: &str, what: &str) -> Result<u32, Error> {
    s.parse().map_err(|_| Error::Usage(format!("{} must be a natural number, got '{}'", what, s)))
}

/// Consumes the remainder of the line as flags; anything else is a usage
/// error, so positional arguments must come first.
fn parse_flags(cur: &mut Cursor<'_>, session: &Session) -> Result<Flags, Error> {
    let mut flags = Flags::default();
    while !cur.at_end() {
        let Some(word) = cur.lex_word() else { break };
        match word {
            "--universe" => flags.universe = Some(parse_universe(flag_value(cur, word)?)?),
            "--theta" => flags.theta = Some(parse_theta_mode(flag_value(cur, word)?)?),
            "--max-k" => flags.max_k = Some(parse_u32(flag_value(cur, word)?, "--max-k")?),
            "--budget" => {
                let v = flag_value(cur, word)?;
                flags.budget = Some(
                    v.parse()
                        .map_err(|_| Error::Usage(format!("--budget must be a number, got '{}'", v)))?,
                );
            }
            "--format" => {
                parse_format(flag_value(cur, word)?)?;
            }
            "-c" => flags.c = Some(cur.parse_term(&session.bindings, &session.budget)?),
            "--k" => flags.k = Some(parse_u32(flag_value(cur, word)?, "--k")?),
            "--classes" => flags.classes = Some(cur.parse_term(&session.bindings, &session.budget)?),
            other => return Err(Error::Usage(format!("unexpected argument '{}'", other))),
        }
    }
    Ok(flags)
}

// ---- Rendering ---- //

struct Rendered {
    text: String,
    docs: Vec<Value>,
    failed: bool,
}

impl Rendered {
    fn ok(text: String, docs: Vec<Value>) -> Self {
        Rendered { text, docs, failed: false }
    }

    fn failed(text: String, docs: Vec<Value>) -> Self {
        Rendered { text, docs, failed: true }
    }
}

fn status_of_error(e: &Error) -> Status {
    match e {
        Error::Parse { .. } | Error::UnknownBinding(_) | Error::Usage(_) | Error::Io(_) => {
            Status::Usage
        }
        _ => Status::Verification,
    }
}

const HF_WARNING: &str = "warning: HF makes every term small; size judgments are vacuous";

fn size_flag_doc(f: &SizeFlag) -> Value {
    match f {
        SizeFlag::Holds => json!({ "holds": true }),
        SizeFlag::Fails { role, term } => {
            json!({ "holds": false, "role": role, "term": term.to_string() })
        }
    }
}

fn size_verdict_doc(cmd: &str, v: &SizeVerdict) -> Value {
    json!({
        "cmd": cmd,
        "universe": v.universe.to_string(),
        "max_k": v.kmax,
        "small": size_flag_doc(&v.small),
        "light": size_flag_doc(&v.light),
        "moderate": size_flag_doc(&v.moderate),
        "least_moderate_k": v.least_moderate_k,
    })
}

fn yoneda_docs(report: &YonedaReport, warning: Option<&str>) -> Vec<Value> {
    let mut docs = Vec::new();
    for (i, p) in report.probes.iter().enumerate() {
        docs.push(json!({
            "cmd": "yoneda",
            "probe": i,
            "object": p.c.to_string(),
            "presheaf_card": p.f_card,
            "nat_count": p.nat_count,
            "bijective": p.bijective,
            "c_natural": p.c_naturality_ok,
            "f_natural": p.f_naturality_ok,
            "entities_ok": p.entities_ok,
            "homset_class_ok": p.homset_class_ok,
            "failures": p.failures,
        }));
    }
    let mut summary = json!({
        "cmd": "yoneda",
        "summary": true,
        "universe": report.universe.to_string(),
        "probes": report.probes.len(),
        "ok": report.all_ok(),
    });
    if let Some(w) = warning {
        summary["warning"] = json!(w);
    }
    docs.push(summary);
    docs
}

// ---- Commands ---- //

fn current_cat<'s>(session: &'s Session) -> Result<&'s LoadedCat, Error> {
    session
        .current
        .as_ref()
        .ok_or_else(|| Error::Usage("no category loaded; use `cat load <path>`".to_string()))
}

fn load_cat_file(session: &Session, path: &str) -> Result<LoadedCat, Error> {
    let text = std::fs::read_to_string(session.resolve(path))?;
    let loaded = parse_catfile(&text, path, &session.bindings, &session.budget)?;
    Ok(loaded)
}

fn monic_members(cat: &FinCat) -> MonoLikeSubcat {
    MonoLikeSubcat { members: cat.mors().into_iter().filter(|&m| cat.is_monic(m)).collect() }
}

fn cmd_cat(cur: &mut Cursor<'_>, session: &mut Session) -> Result<Rendered, Error> {
    let sub = cur
        .lex_word()
        .ok_or_else(|| Error::Usage("cat needs a subcommand: load, validate, classify, encode".to_string()))?;
    match sub {
        "load" => {
            let path = cur
                .lex_word()
                .ok_or_else(|| Error::Usage("cat load needs a file path".to_string()))?
                .to_string();
            parse_flags(cur, session)?;
            let loaded = load_cat_file(session, &path)?;
            if let Err(msg) = validate_category(&loaded.cat) {
                return Ok(Rendered::failed(
                    format!("invalid category: {}", msg),
                    vec![json!({ "cmd": "cat-load", "path": path, "violation": msg })],
                ));
            }
            let mut text = format!(
                "loaded {}: {} objects, {} morphisms",
                path,
                loaded.cat.objects.len(),
                loaded.cat.mors().len()
            );
            let mut mor_docs = Vec::new();
            for &o in &loaded.cat.objects {
                text.push_str(&format!("\nobject {}", o));
            }
            for (name, m) in &loaded.mor_names {
                text.push_str(&format!("\nmor {}: {} -> {} = {}", name, m.dom, m.cod, m.term));
                mor_docs.push(json!({
                    "name": name,
                    "dom": m.dom.to_string(),
                    "cod": m.cod.to_string(),
                    "term": m.term.to_string(),
                }));
            }
            let objects: Vec<String> = loaded.cat.objects.iter().map(|o| o.to_string()).collect();
            let doc = json!({
                "cmd": "cat-load",
                "path": path,
                "objects": objects,
                "morphisms": mor_docs,
            });
            session.current = Some(loaded);
            Ok(Rendered::ok(text, vec![doc]))
        }
        "validate" => {
            let path = cur.rest().trim_start().starts_with("--").then_some(None).unwrap_or_else(
                || cur.lex_word().map(|w| w.to_string()).map(Some).unwrap_or(None),
            );
            parse_flags(cur, session)?;
            let owned;
            let (loaded, shown) = match &path {
                Some(p) => {
                    owned = load_cat_file(session, p)?;
                    (&owned, p.clone())
                }
                None => {
                    let c = current_cat(session)?;
                    (c, c.path.clone())
                }
            };
            match validate_category(&loaded.cat) {
                Ok(()) => Ok(Rendered::ok(
                    "ok".to_string(),
                    vec![json!({ "cmd": "cat-validate", "path": shown, "ok": true })],
                )),
                Err(msg) => Ok(Rendered::failed(
                    format!("violation: {}", msg),
                    vec![json!({ "cmd": "cat-validate", "path": shown, "ok": false, "violation": msg })],
                )),
            }
        }
        "classify" => {
            let flags = parse_flags(cur, session)?;
            let eff = flags.eff(session);
            let loaded = current_cat(session)?;
            let verdict = classify_category(&loaded.cat, eff.universe, eff.max_k);
            let mut text = String::new();
            if eff.universe == UniverseSpec::HF {
                text.push_str(HF_WARNING);
                text.push('\n');
            }
            text.push_str(verdict.to_string().trim_end_matches('\n'));
            let mut doc = size_verdict_doc("cat-classify", &verdict);
            if eff.universe == UniverseSpec::HF {
                doc["warning"] = json!(HF_WARNING);
            }
            Ok(Rendered::ok(text, vec![doc]))
        }
        "encode" => {
            parse_flags(cur, session)?;
            let loaded = current_cat(session)?;
            let t = encode_category(&loaded.cat);
            Ok(Rendered::ok(
                t.to_string(),
                vec![json!({ "cmd": "cat-encode", "path": loaded.path, "term": t.to_string() })],
            ))
        }
        other => Err(Error::Usage(format!("unknown cat subcommand '{}'", other))),
    }
}

fn cmd_classifier(cur: &mut Cursor<'_>, session: &Session) -> Result<Rendered, Error> {
    let m = parse_u32(
        cur.lex_word().ok_or_else(|| Error::Usage("classifier needs a size bound".to_string()))?,
        "classifier size",
    )?;
    let flags = parse_flags(cur, session)?;
    let eff = flags.eff(session);
    let report = classifier_check(m, eff.theta, &eff.budget)?;
    let mut text = format!(
        "classifier check m = {} (theta {})\nomega = {}\ntrue = {}\nmonos checked: {}\nstable at m+1: {}",
        report.m,
        theta_name(report.mode),
        report.omega,
        report.true_elem,
        report.monos_checked,
        report.stable_next
    );
    for f in &report.failures {
        text.push_str(&format!("\nfailure: {}", f));
    }
    text.push_str(if report.ok() { "\nok" } else { "\nfailed" });
    let doc = json!({
        "cmd": "classifier",
        "m": report.m,
        "theta": theta_name(report.mode),
        "omega": report.omega.to_string(),
        "true": report.true_elem.to_string(),
        "monos_checked": report.monos_checked,
        "stable_next": report.stable_next,
        "failures": report.failures,
        "ok": report.ok(),
    });
    if report.ok() {
        Ok(Rendered::ok(text, vec![doc]))
    } else {
        Ok(Rendered::failed(text, vec![doc]))
    }
}

fn cmd_subobjects(cur: &mut Cursor<'_>, session: &Session) -> Result<Rendered, Error> {
    let path = cur
        .lex_word()
        .ok_or_else(|| Error::Usage("subobjects needs a category file".to_string()))?
        .to_string();
    let flags = parse_flags(cur, session)?;
    let eff = flags.eff(session);
    let c = flags.c.ok_or_else(|| Error::Usage("subobjects needs -c <object>".to_string()))?;
    let loaded = load_cat_file(session, &path)?;
    if let Err(msg) = validate_category(&loaded.cat) {
        return Err(Error::Presentation(format!("invalid category: {}", msg)));
    }
    if !loaded.cat.objects.contains(&c) {
        return Err(Error::Usage(format!("{} is not an object of {}", c, path)));
    }
    let members = monic_members(&loaded.cat);
    let s = subs_star(&loaded.cat, &members, c, eff.theta)?;
    let mut text = format!("subs* at {} (theta {}): {}", c, theta_name(eff.theta), s.term);
    let mut block_docs = Vec::new();
    for (rep, block) in &s.blocks {
        text.push_str(&format!("\nrep {} block {}", rep, block));
        block_docs.push(json!({ "rep": rep.to_string(), "block": block.to_string() }));
    }
    let mut order_docs = Vec::new();
    for (a, b) in &s.order {
        text.push_str(&format!("\nle {} {}", a, b));
        order_docs.push(json!([a.to_string(), b.to_string()]));
    }
    let doc = json!({
        "cmd": "subobjects",
        "path": path,
        "object": c.to_string(),
        "theta": theta_name(eff.theta),
        "term": s.term.to_string(),
        "blocks": block_docs,
        "order": order_docs,
    });
    Ok(Rendered::ok(text, vec![doc]))
}

fn cmd_wp_validate(cur: &mut Cursor<'_>, session: &Session) -> Result<Rendered, Error> {
    let catpath = cur
        .lex_word()
        .ok_or_else(|| Error::Usage("wp-validate needs a category file".to_string()))?
        .to_string();
    let wppath = cur
        .lex_word()
        .ok_or_else(|| Error::Usage("wp-validate needs a well-powering file".to_string()))?
        .to_string();
    let flags = parse_flags(cur, session)?;
    let eff = flags.eff(session);
    let loaded = load_cat_file(session, &catpath)?;
    if let Err(msg) = validate_category(&loaded.cat) {
        return Err(Error::Presentation(format!("invalid category: {}", msg)));
    }
    let wptext = std::fs::read_to_string(session.resolve(&wppath))?;
    let wp = parse_wpfile(&wptext, &loaded, &session.bindings, &session.budget)?;
    let members = monic_members(&loaded.cat);
    match validate_well_powering(&loaded.cat, &members, &wp, eff.universe) {
        Ok(v) => {
            let mut text = String::new();
            if eff.universe == UniverseSpec::HF {
                text.push_str(HF_WARNING);
                text.push('\n');
            }
            text.push_str(&format!("well-powering valid under {}", eff.universe));
            let mut fam_docs = Vec::new();
            for (c, (index_set, small)) in &v.index_smallness {
                text.push_str(&format!("\nat {}: index set {} small {}", c, index_set, small));
                fam_docs.push(json!({
                    "object": c.to_string(),
                    "index_set": index_set.to_string(),
                    "small": small,
                }));
            }
            let mut doc = json!({
                "cmd": "wp-validate",
                "category": catpath,
                "well_powering": wppath,
                "universe": eff.universe.to_string(),
                "ok": true,
                "families": fam_docs,
            });
            if eff.universe == UniverseSpec::HF {
                doc["warning"] = json!(HF_WARNING);
            }
            Ok(Rendered::ok(text, vec![doc]))
        }
        Err(msg) => Ok(Rendered::failed(
            format!("violation: {}", msg),
            vec![json!({
                "cmd": "wp-validate",
                "category": catpath,
                "well_powering": wppath,
                "universe": eff.universe.to_string(),
                "ok": false,
                "violation": msg,
            })],
        )),
    }
}

fn run_command_inner(line: &str, session: &mut Session) -> Result<(Rendered, Format), Error> {
    let mut cur = Cursor::new(line);
    let Some(word) = cur.lex_word() else {
        return Ok((Rendered::ok(String::new(), Vec::new()), session.format));
    };
    let word = word.to_string();
    let rendered = match word.as_str() {
        "let" => {
            let name = cur
                .lex_ident()
                .ok_or_else(|| Error::Usage("let needs a binding name".to_string()))?
                .to_string();
            cur.expect('=')?;
            let t = cur.parse_term(&session.bindings, &session.budget)?;
            parse_flags(&mut cur, session)?;
            session.bindings.insert(name.clone(), t);
            Ok(Rendered::ok(
                format!("{} = {}", name, t),
                vec![json!({ "cmd": "let", "name": name, "term": t.to_string() })],
            ))
        }
        "rank" => {
            let t = cur.parse_term(&session.bindings, &session.budget)?;
            parse_flags(&mut cur, session)?;
            Ok(Rendered::ok(
                t.rank().to_string(),
                vec![json!({ "cmd": "rank", "term": t.to_string(), "rank": t.rank() })],
            ))
        }
        "ack" => {
            let t = cur.parse_term(&session.bindings, &session.budget)?;
            let flags = parse_flags(&mut cur, session)?;
            let code = ack_encode(t, &flags.eff(session).budget)?;
            Ok(Rendered::ok(
                code.to_string(),
                vec![json!({ "cmd": "ack", "term": t.to_string(), "code": code.to_string() })],
            ))
        }
        "unack" => {
            let word = cur
                .lex_word()
                .ok_or_else(|| Error::Usage("unack needs a natural number".to_string()))?;
            let n = BigUint::parse_bytes(word.as_bytes(), 10)
                .ok_or_else(|| Error::Usage(format!("unack needs a natural number, got '{}'", word)))?;
            let flags = parse_flags(&mut cur, session)?;
            let t = ack_decode(&n, &flags.eff(session).budget)?;
            Ok(Rendered::ok(
                t.to_string(),
                vec![json!({ "cmd": "unack", "code": n.to_string(), "term": t.to_string() })],
            ))
        }
        "pow" => {
            let t = cur.parse_term(&session.bindings, &session.budget)?;
            let flags = parse_flags(&mut cur, session)?;
            let p = powerset(t, &flags.eff(session).budget)?;
            Ok(Rendered::ok(
                p.to_string(),
                vec![json!({ "cmd": "pow", "term": t.to_string(), "powerset": p.to_string() })],
            ))
        }
        "pair" => {
            let a = cur.parse_term(&session.bindings, &session.budget)?;
            let b = cur.parse_term(&session.bindings, &session.budget)?;
            parse_flags(&mut cur, session)?;
            let p = kpair(a, b);
            Ok(Rendered::ok(
                p.to_string(),
                vec![json!({
                    "cmd": "pair",
                    "left": a.to_string(),
                    "right": b.to_string(),
                    "pair": p.to_string(),
                })],
            ))
        }
        "spair" => {
            let a = cur.parse_term(&session.bindings, &session.budget)?;
            let b = cur.parse_term(&session.bindings, &session.budget)?;
            parse_flags(&mut cur, session)?;
            let p = star_pair(a, b);
            Ok(Rendered::ok(
                p.to_string(),
                vec![json!({
                    "cmd": "spair",
                    "left": a.to_string(),
                    "right": b.to_string(),
                    "pair": p.to_string(),
                })],
            ))
        }
        "sunpair" => {
            let z = cur.parse_term(&session.bindings, &session.budget)?;
            parse_flags(&mut cur, session)?;
            let (a, b) = star_unpair(z).ok_or_else(|| Error::BadShape {
                expected: "star pair",
                term: z.to_string(),
            })?;
            Ok(Rendered::ok(
                format!("{}\n{}", a, b),
                vec![json!({
                    "cmd": "sunpair",
                    "pair": z.to_string(),
                    "left": a.to_string(),
                    "right": b.to_string(),
                })],
            ))
        }
        "theta" => {
            let t = cur.parse_term(&session.bindings, &session.budget)?;
            let flags = parse_flags(&mut cur, session)?;
            let eff = flags.eff(session);
            let r = theta(t, eff.theta)?;
            Ok(Rendered::ok(
                r.to_string(),
                vec![json!({
                    "cmd": "theta",
                    "mode": theta_name(eff.theta),
                    "input": t.to_string(),
                    "representative": r.to_string(),
                })],
            ))
        }
        "quot" => {
            let carrier = cur.parse_term(&session.bindings, &session.budget)?;
            let rel = cur.parse_term(&session.bindings, &session.budget)?;
            let flags = parse_flags(&mut cur, session)?;
            let eff = flags.eff(session);
            let r = EquivRelation::from_term(carrier, rel)?;
            let q = quotient_star(carrier, &r, eff.theta)?;
            Ok(Rendered::ok(
                q.to_string(),
                vec![json!({
                    "cmd": "quot",
                    "mode": theta_name(eff.theta),
                    "carrier": carrier.to_string(),
                    "relation": rel.to_string(),
                    "quotient": q.to_string(),
                })],
            ))
        }
        "psi" => {
            let x = cur.parse_term(&session.bindings, &session.budget)?;
            let flags = parse_flags(&mut cur, session)?;
            let eff = flags.eff(session);
            let spec = match (flags.classes, flags.k) {
                (Some(a), None) => ClassSpec::Explicit(a),
                (None, Some(k)) => ClassSpec::KClasses(k),
                (None, None) => {
                    return Err(Error::Usage(
                        "psi needs --classes <term> or --k <n>".to_string(),
                    ))
                }
                (Some(_), Some(_)) => {
                    return Err(Error::Usage(
                        "psi takes --classes or --k, not both".to_string(),
                    ))
                }
            };
            let member = psi_member(x, &spec, eff.universe);
            let mut text = String::new();
            if eff.universe == UniverseSpec::HF {
                text.push_str(HF_WARNING);
                text.push('\n');
            }
            text.push_str(if member { "true" } else { "false" });
            let mut doc = json!({
                "cmd": "psi",
                "term": x.to_string(),
                "universe": eff.universe.to_string(),
                "member": member,
            });
            match spec {
                ClassSpec::Explicit(a) => doc["classes"] = json!(a.to_string()),
                ClassSpec::KClasses(k) => doc["k"] = json!(k),
            }
            if eff.universe == UniverseSpec::HF {
                doc["warning"] = json!(HF_WARNING);
            }
            Ok(Rendered::ok(text, vec![doc]))
        }
        "classify" => {
            let x = cur.parse_term(&session.bindings, &session.budget)?;
            let flags = parse_flags(&mut cur, session)?;
            let eff = flags.eff(session);
            let class_k = least_k(x, eff.universe, eff.max_k, false);
            let entity_k = least_k(x, eff.universe, eff.max_k, true);
            let mut text = String::new();
            if eff.universe == UniverseSpec::HF {
                text.push_str(HF_WARNING);
                text.push('\n');
            }
            text.push_str(&format!("classify {} under {} up to k = {}", x, eff.universe, eff.max_k));
            let level = |label: &str, v: Option<u32>| match v {
                Some(k) => format!("\nleast k with {}: {}", label, k),
                None => format!("\nleast k with {}: none up to {}", label, eff.max_k),
            };
            text.push_str(&level("k-class", class_k));
            text.push_str(&level("k-entity", entity_k));
            let mut doc = json!({
                "cmd": "classify",
                "term": x.to_string(),
                "universe": eff.universe.to_string(),
                "max_k": eff.max_k,
                "least_class_k": class_k,
                "least_entity_k": entity_k,
            });
            if eff.universe == UniverseSpec::HF {
                doc["warning"] = json!(HF_WARNING);
            }
            Ok(Rendered::ok(text, vec![doc]))
        }
        "axioms" => {
            let flags = parse_flags(&mut cur, session)?;
            let eff = flags.eff(session);
            let report = check_universe_axioms(eff.universe, &eff.budget);
            let mut clause_docs = Vec::new();
            for (clause, verdict) in &report.clauses {
                let v = match verdict {
                    crate::universe::Verdict::Pass { note } => {
                        json!({ "clause": clause.to_string(), "verdict": "pass", "note": note })
                    }
                    crate::universe::Verdict::Fail { witness, note } => json!({
                        "clause": clause.to_string(),
                        "verdict": "fail",
                        "witness": witness.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                        "note": note,
                    }),
                    crate::universe::Verdict::NotApplicable { note } => json!({
                        "clause": clause.to_string(),
                        "verdict": "not-applicable",
                        "note": note,
                    }),
                };
                clause_docs.push(v);
            }
            let doc = json!({
                "cmd": "axioms",
                "universe": eff.universe.to_string(),
                "all_pass": report.all_pass(),
                "clauses": clause_docs,
            });
            Ok(Rendered::ok(report.to_string().trim_end_matches('\n').to_string(), vec![doc]))
        }
        "cat" => cmd_cat(&mut cur, session),
        "yoneda" => {
            let path = if cur.at_end() || cur.rest().trim_start().starts_with("--") {
                None
            } else {
                cur.lex_word().map(|w| w.to_string())
            };
            let flags = parse_flags(&mut cur, session)?;
            let eff = flags.eff(session);
            let owned;
            let loaded = match &path {
                Some(p) => {
                    owned = load_cat_file(session, p)?;
                    if let Err(msg) = validate_category(&owned.cat) {
                        return Err(Error::Presentation(format!("invalid category: {}", msg)));
                    }
                    &owned
                }
                None => current_cat(session)?,
            };
            let probes = probe_battery(&loaded.cat, &eff.budget)?;
            let report = yoneda_check(&loaded.cat, &probes, eff.universe, &eff.budget)?;
            let warning =
                (eff.universe == UniverseSpec::HF).then_some(HF_WARNING);
            let mut text = String::new();
            if let Some(w) = warning {
                text.push_str(w);
                text.push('\n');
            }
            text.push_str(report.to_string().trim_end_matches('\n'));
            let docs = yoneda_docs(&report, warning);
            if report.all_ok() {
                Ok(Rendered::ok(text, docs))
            } else {
                Ok(Rendered::failed(text, docs))
            }
        }
        "subobjects" => cmd_subobjects(&mut cur, session),
        "wp-validate" => cmd_wp_validate(&mut cur, session),
        "classifier" => cmd_classifier(&mut cur, session),
        other => Err(Error::Usage(format!("unknown command '{}'", other))),
    }?;
    // Effective format needs the flags, which each arm consumed; re-scan
    // the tail of the line for a format override instead of re-parsing.
    let fmt = line
        .split_whitespace()
        .collect::<Vec<_>>()
        .windows(2)
        .find(|w| w[0] == "--format")
        .map(|w| parse_format(w[1]))
        .transpose()?
        .unwrap_or(session.format);
    Ok((rendered, fmt))
}

pub fn run_command(line: &str, session: &mut Session) -> Outcome {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Outcome { text: String::new(), status: Status::Ok };
    }
    match run_command_inner(trimmed, session) {
        Ok((rendered, fmt)) => {
            let text = match fmt {
                Format::Text => rendered.text,
                Format::Doc => rendered
                    .docs
                    .iter()
                    .map(|d| serde_json::to_string(d).expect("value serializes"))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            let status = if rendered.failed { Status::Verification } else { Status::Ok };
            Outcome { text, status }
        }
        Err(e) => {
            let status = status_of_error(&e);
            let fmt = session.format;
            let text = match fmt {
                Format::Text => format!("error: {}", e),
                Format::Doc => serde_json::to_string(&json!({
                    "error": e.to_string(),
                    "status": status.code(),
                }))
                .expect("value serializes"),
            };
            Outcome { text, status }
        }
    }
}

/// Runs a script: every non-empty line is echoed with a `>` prefix and its
/// report appended. The status is the worst over all lines.
pub fn run_script(text: &str, session: &mut Session) -> (String, Status) {
    let mut out = String::new();
    let mut status = Status::Ok;
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push_str("> ");
        out.push_str(trimmed);
        out.push('\n');
        let outcome = run_command(trimmed, session);
        if !outcome.text.is_empty() {
            out.push_str(&outcome.text);
            out.push('\n');
        }
        status = status.max(outcome.status);
    }
    (out, status)
}
