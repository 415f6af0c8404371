//! Drive the four batch commands from code and list the files they write.

use vcontact::cli::{run, Command, RunConfig};

fn main() {
    let out = std::env::temp_dir().join("vcontact-example");
    let cfg = RunConfig {
        out: out.clone(),
        grid: Some(60),
        ..Default::default()
    };
    for cmd in [Command::Verify, Command::Foliate, Command::Orbits, Command::Mane] {
        match run(cmd, &cfg) {
            Ok(o) => println!("{} -> exit {} {:?}", o.summary, o.code, o.files),
            Err(e) => println!("{cmd:?} failed: {e} (exit {})", e.exit_code()),
        }
    }
    println!("outputs in {}", out.display());
}
