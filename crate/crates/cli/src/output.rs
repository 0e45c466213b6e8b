//! Report emission in JSON, CSV and human-readable tables.

use std::time::Duration;

use clap::ValueEnum;
use katona::averaging::{fraction_string, to_f64, AverageReport, Exact, Rational, SampleReport};
use katona::constructions::{Construction, ConstructionId};
use katona::search::{SearchReport, TheoremId, Verification, Witness};
use katona::SetFamily;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

pub struct Printer {
    format: Format,
    timing: bool,
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

/// Quotes a CSV field when needed.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sets_text(fam: &SetFamily) -> String {
    let members: Vec<String> = fam.members().iter().map(ToString::to_string).collect();
    format!("[{}]", members.join(" "))
}

/// Arcs where every member is an arc, point sets otherwise.
fn witness_text(w: &Witness) -> String {
    let slots: Vec<String> = (0..w.slots.len())
        .map(|i| w.arcs(i).map(|a| a.to_string()).unwrap_or_else(|_| sets_text(&w.slots[i])))
        .collect();
    slots.join(" | ")
}

fn table(header: &[&str], rows: &[Vec<String>]) {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        println!("{}", padded.join("  ").trim_end());
    };
    line(header.iter().map(|h| h.to_string()).collect());
    for row in rows {
        line(row.clone());
    }
}

impl Printer {
    pub fn new(format: Format, timing: bool) -> Self {
        Printer { format, timing }
    }

    fn json(&self, v: &Value) {
        println!("{}", serde_json::to_string(v).expect("reports serialize"));
    }

    /// Drops run-dependent fields unless timing was requested.
    fn scrub(&self, mut v: Value, elapsed: Duration) -> Value {
        if let Value::Object(map) = &mut v {
            if self.timing {
                map.insert("elapsed_ms".into(), json!(elapsed.as_secs_f64() * 1e3));
            } else {
                map.remove("nodes_explored");
            }
        }
        v
    }

    pub fn verifications(&self, rows: &[Verification]) {
        match self.format {
            Format::Json => {
                let all: Vec<Value> = rows
                    .iter()
                    .map(|v| self.scrub(serde_json::to_value(v).expect("reports serialize"), v.elapsed))
                    .collect();
                self.json(&Value::Array(all));
            }
            Format::Csv => {
                let mut header = "theorem,params,bound,achieved,tight,extremal_count,ok,failed_claims".to_string();
                if self.timing {
                    header.push_str(",nodes_explored,elapsed_ms");
                }
                println!("{header}");
                for v in rows {
                    let mut cells = vec![
                        v.theorem.to_string(),
                        v.params.to_string(),
                        v.bound.to_string(),
                        v.achieved.to_string(),
                        v.tight.to_string(),
                        v.extremal_count.map_or(String::new(), |c| c.to_string()),
                        v.ok().to_string(),
                        failed(v).join(";"),
                    ];
                    if self.timing {
                        cells.push(v.nodes_explored.to_string());
                        cells.push(ms(v.elapsed));
                    }
                    println!("{}", cells.iter().map(|c| field(c)).collect::<Vec<_>>().join(","));
                }
            }
            Format::Human => {
                let mut header = vec!["theorem", "params", "bound", "achieved", "tight", "extremal", "status"];
                if self.timing {
                    header.extend(["nodes", "ms"]);
                }
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|v| {
                        let bad = failed(v);
                        let mut cells = vec![
                            v.theorem.to_string(),
                            v.params.to_string(),
                            v.bound.to_string(),
                            v.achieved.to_string(),
                            if v.tight { "yes" } else { "no" }.to_string(),
                            v.extremal_count.map_or("-".into(), |c| c.to_string()),
                            if bad.is_empty() {
                                format!("ok ({} claim{})", v.claims.len(), if v.claims.len() == 1 { "" } else { "s" })
                            } else {
                                format!("FAILED: {}", bad.join(", "))
                            },
                        ];
                        if self.timing {
                            cells.push(v.nodes_explored.to_string());
                            cells.push(ms(v.elapsed));
                        }
                        cells
                    })
                    .collect();
                table(&header, &body);
            }
        }
    }

    pub fn search(&self, r: &SearchReport, elapsed: Duration) {
        match self.format {
            Format::Json => self.json(&self.scrub(serde_json::to_value(r).expect("reports serialize"), elapsed)),
            Format::Csv => {
                let mut header = "optimum,extremal_count,extremal_count_complete,witnesses".to_string();
                if self.timing {
                    header.push_str(",nodes_explored,elapsed_ms");
                }
                println!("{header}");
                let ws: Vec<String> = r.witnesses.iter().map(witness_text).collect();
                let mut cells = vec![
                    r.optimum.map_or(String::new(), |s| s.to_string()),
                    r.extremal_count.to_string(),
                    r.extremal_count_complete.to_string(),
                    ws.join(";"),
                ];
                if self.timing {
                    cells.push(r.nodes_explored.to_string());
                    cells.push(ms(elapsed));
                }
                println!("{}", cells.iter().map(|c| field(c)).collect::<Vec<_>>().join(","));
            }
            Format::Human => {
                match r.optimum {
                    Some(o) => println!("optimum: {o}"),
                    None => println!("optimum: none (no configuration meets the non-emptiness demands)"),
                }
                let complete = if r.extremal_count_complete { "" } else { " (incomplete)" };
                println!("optimal configurations up to symmetry: {}{complete}", r.extremal_count);
                for w in &r.witnesses {
                    println!("  {}", witness_text(w));
                }
                if self.timing {
                    println!("nodes: {}  time: {} ms", r.nodes_explored, ms(elapsed));
                }
            }
        }
    }

    pub fn budget(&self, nodes: u64, log2_states: usize, best: Option<&str>, upper: &str) {
        let v = json!({
            "status": "budget-exceeded",
            "exact": false,
            "nodes_explored": nodes,
            "log2_states": log2_states,
            "best_found": best,
            "upper_bound": upper,
        });
        match self.format {
            Format::Json => self.json(&v),
            Format::Csv => {
                println!("status,exact,nodes_explored,best_found,upper_bound");
                println!("budget-exceeded,false,{nodes},{},{}", best.unwrap_or(""), field(upper));
            }
            Format::Human => {
                println!("budget exceeded after {nodes} nodes; results are NOT exact");
                println!("best found (lower bound): {}", best.unwrap_or("none"));
                println!("upper bound: {upper}");
            }
        }
    }

    pub fn lym(&self, fam: &SetFamily, sums: &[(&str, Rational)]) {
        match self.format {
            Format::Json => {
                let mut v = json!({ "n": fam.n(), "members": fam.len() });
                for (mode, r) in sums {
                    v[*mode] = serde_json::to_value(Exact::from(r)).expect("reports serialize");
                }
                self.json(&v);
            }
            Format::Csv => {
                println!("mode,fraction,decimal");
                for (mode, r) in sums {
                    println!("{mode},{},{}", fraction_string(r), to_f64(r));
                }
            }
            Format::Human => {
                println!("n = {}, {} members", fam.n(), fam.len());
                let rows: Vec<Vec<String>> =
                    sums.iter().map(|(m, r)| vec![m.to_string(), fraction_string(r), format!("{:.6}", to_f64(r))]).collect();
                table(&["mode", "exact", "decimal"], &rows);
            }
        }
    }

    pub fn average(&self, r: &AverageReport) {
        match self.format {
            Format::Json => self.json(&serde_json::to_value(r).expect("reports serialize")),
            Format::Csv => {
                println!("n,k,orders,average,density,max_trace,max_ratio");
                println!(
                    "{},{},{},{},{},{},{}",
                    r.n,
                    r.k,
                    r.orders,
                    fraction_string(&r.average),
                    fraction_string(&r.density),
                    r.max_trace,
                    fraction_string(&r.max_ratio)
                );
            }
            Format::Human => {
                println!("n = {}, k = {}, {} cyclic orders", r.n, r.k, r.orders);
                println!("average trace / n: {} ({:.6})", fraction_string(&r.average), to_f64(&r.average));
                println!("|F| / C(n,k):      {} ({:.6})", fraction_string(&r.density), to_f64(&r.density));
                println!("max trace:         {} (max trace / n = {})", r.max_trace, fraction_string(&r.max_ratio));
            }
        }
    }

    pub fn sample(&self, r: &SampleReport) {
        match self.format {
            Format::Json => self.json(&serde_json::to_value(r).expect("reports serialize")),
            Format::Csv => {
                println!("n,k,trials,seed,estimate,exact,std_error,max_trace_seen");
                println!(
                    "{},{},{},{},{},{},{},{}",
                    r.n,
                    r.k,
                    r.trials,
                    r.seed,
                    to_f64(&r.estimate),
                    fraction_string(&r.exact),
                    r.std_error,
                    r.max_trace_seen
                );
            }
            Format::Human => {
                println!("n = {}, k = {}, {} sampled orders (seed {})", r.n, r.k, r.trials, r.seed);
                println!("estimate:     {:.6} +- {:.6} (sampled, not exact)", to_f64(&r.estimate), r.std_error);
                println!("|F| / C(n,k): {} ({:.6})", fraction_string(&r.exact), to_f64(&r.exact));
                println!("max trace seen: {}", r.max_trace_seen);
            }
        }
    }

    pub fn theorems(&self, ids: &[TheoremId]) {
        match self.format {
            Format::Json => {
                let all: Vec<Value> = ids
                    .iter()
                    .map(|id| json!({ "id": id, "params": id.params(), "summary": id.summary() }))
                    .collect();
                self.json(&Value::Array(all));
            }
            Format::Csv => {
                println!("id,params,summary");
                for id in ids {
                    println!("{},{},{}", id, field(&id.params().join(" ")), field(id.summary()));
                }
            }
            Format::Human => {
                for id in ids {
                    println!("{id} ({})", id.params().join(", "));
                    println!("    {}", id.summary());
                }
            }
        }
    }

    pub fn construction(&self, id: &ConstructionId, c: &Construction) {
        match self.format {
            Format::Json => self.json(&json!({ "id": id.to_string(), "size": c.len(), "family": c })),
            Format::Csv => {
                println!("member");
                for m in c.to_sets().members() {
                    println!("{}", field(&m.to_string()));
                }
            }
            Format::Human => {
                println!("{id}: {} members", c.len());
                match c {
                    Construction::Arcs(f) => println!("{f}"),
                    Construction::Sets(f) => println!("{}", sets_text(f)),
                }
            }
        }
    }
}

fn failed(v: &Verification) -> Vec<String> {
    v.claims.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect()
}
