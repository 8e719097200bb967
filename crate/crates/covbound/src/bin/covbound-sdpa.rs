//! Minimal SDPA-compatible solver: `covbound-sdpa -ds in.dat-s -o out [-p param]`.

use std::process::ExitCode;

use covbound::backend::{solve_sdpa, SolveParams};
use covbound::sdpa::{parse_sdpa, SdpaData};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut input = None;
    let mut output = None;
    let mut param = None;
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let slot = match flag.as_str() {
            "-ds" | "-dd" => &mut input,
            "-o" => &mut output,
            "-p" => &mut param,
            _ => {
                eprintln!("unknown argument {flag:?}");
                return ExitCode::from(2);
            }
        };
        match it.next() {
            Some(v) => *slot = Some(v.clone()),
            None => {
                eprintln!("missing value for {flag}");
                return ExitCode::from(2);
            }
        }
    }
    let Some(input) = input else {
        eprintln!("usage: covbound-sdpa -ds INPUT -o OUTPUT [-p PARAMS]");
        return ExitCode::from(2);
    };
    let params = match &param {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(text) => SolveParams::parse(&text),
            Err(e) => {
                eprintln!("cannot read {p}: {e}");
                return ExitCode::from(1);
            }
        },
        None => SolveParams::default(),
    };
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {input}: {e}");
            return ExitCode::from(1);
        }
    };
    let data: SdpaData<f64> = match parse_sdpa(&text, |s| s.parse::<f64>().ok()) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{input}: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = solve_sdpa(&data, &params);
    let report = outcome.render();
    print!("{report}");
    if let Some(out) = output {
        if let Err(e) = std::fs::write(&out, &report) {
            eprintln!("cannot write {out}: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}
