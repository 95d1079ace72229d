//! Drives the command-line front end in-process with a generated config.
//!
//! cargo run --example cli_run

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("raychart-cli-example");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("free.cfg");
    std::fs::write(
        &config,
        "# free particle moving up the line x1 = 1\n\
         curve.kind = point\n\
         state.r = 1.4142135623730951\n\
         state.psi = pi/4\n\
         state.p_r = 0.7071067811865476\n\
         state.p_psi = 1\n\
         run.psi_ref = pi/4\n\
         run.t_max = 3\n\
         run.out_dir = out\n\
         run.svg = true\n",
    )?;
    let cfg = config.display().to_string();
    for command in ["trajectory", "invariant-check", "cross-check"] {
        println!("$ raychart {command} {cfg}");
        let code = raychart::cli::run([command.to_string(), cfg.clone()]);
        println!("exit status {code}\n");
    }
    println!("outputs in {}", dir.join("out").display());
    Ok(())
}
