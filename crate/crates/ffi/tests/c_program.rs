use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "interchange.h"

int main(void) {
    IcGraph *g = NULL;
    if (ic_graph_complete(4, &g) != IC_STATUS_OK) return 1;
    IcState *s = NULL;
    if (ic_state_identity(g, &s) != IC_STATUS_OK) return 2;
    IcDelta d;
    if (ic_state_apply_transposition(s, 0, 1, &d) != IC_STATUS_OK || d.kind != -1) return 3;
    if (ic_state_num_cycles(s) != 3) return 4;
    if (ic_state_apply_transposition(s, 0, 9, NULL) != IC_STATUS_PRECONDITION) return 5;
    if (strlen(ic_last_error_message()) == 0) return 6;
    double t = 0.0;
    if (ic_critical_time(1.0, 5.0, &t) != IC_STATUS_OK || t != 2.0) return 7;
    IcChain *c = NULL;
    if (ic_chain_build(g, 40320, &c) != IC_STATUS_OK) return 8;
    double z = 0.0;
    if (ic_chain_partition(c, 1.0, 0.7, &z) != IC_STATUS_OK || z < 1.0 - 1e-12 || z > 1.0 + 1e-12) return 9;
    IcEstimate e;
    if (ic_estimate_log_partition(g, 2.0, 0.5, 100, 3, &e) != IC_STATUS_OK || e.replicas != 100) return 10;
    ic_chain_free(c);
    ic_state_free(s);
    ic_graph_free(g);
    printf("%s\n", ic_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libinterchange_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let work = Path::new(env!("CARGO_TARGET_TMPDIR")).join("c_program");
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    let bin = work.join("main");
    std::fs::write(&src, PROGRAM).unwrap();

    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
