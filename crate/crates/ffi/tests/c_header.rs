use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const SOURCE: &str = r#"
#include <stdio.h>
#include "nhse.h"

int main(void) {
    NhseParams p = nhse_params_default();
    p.num_sites = 12;
    NhseModel *m = NULL;
    if (nhse_model_new(&p, &m) != NHSE_STATUS_OK) return 10;
    NhseSpectrum *s = NULL;
    if (nhse_spectrum_new(m, &s) != NHSE_STATUS_OK) return 11;
    if (nhse_spectrum_len(s) != 24) return 12;
    NhseComplex z;
    if (nhse_spectrum_get(s, 99, &z) != NHSE_STATUS_INVALID_ARGUMENT) return 13;
    if (nhse_last_error_message()[0] == '\0') return 14;
    NhseVerdict v;
    double r;
    if (nhse_model_verdict(m, 1e-10, &v, &r) != NHSE_STATUS_OK) return 15;
    if (v != NHSE_VERDICT_BLOCKED) return 16;
    nhse_spectrum_free(s);
    nhse_model_free(m);
    p.num_sites = 0;
    if (nhse_model_new(&p, &m) != NHSE_STATUS_CONFIG_ERROR) return 17;
    printf("ok\n");
    return 0;
}
"#;

fn library_dir() -> PathBuf {
    let exe = env::current_exe().unwrap();
    exe.ancestors()
        .skip(1)
        .take(2)
        .find(|d| d.join("libnhse.so").exists())
        .map(Path::to_path_buf)
        .expect("libnhse.so next to the test binary")
}

#[test]
fn header_compiles_and_links_from_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = library_dir();
    let work = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let src = work.join("abi_smoke.c");
    let bin = work.join("abi_smoke");
    fs::write(&src, SOURCE).unwrap();
    let status = Command::new(env::var("CC").unwrap_or_else(|_| "cc".into()))
        .args(["-std=c99", "-Wall", "-Werror"])
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .arg("-L")
        .arg(&lib)
        .arg(format!("-Wl,-rpath,{}", lib.display()))
        .args(["-lnhse", "-lm"])
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
