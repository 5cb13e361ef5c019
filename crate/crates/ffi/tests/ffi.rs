use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use tsaug_ffi::*;

fn data(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/testdata/ucr").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tsaug_last_error()) }.to_string_lossy().into_owned()
}

fn load(name: &str) -> *mut TsaugDataset {
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { tsaug_dataset_load(data(name).as_ptr(), &mut ds) }, TsaugStatus::Ok);
    ds
}

#[test]
fn method_registry() {
    assert_eq!(tsaug_method_count(), 19);
    let names: Vec<String> = (0..tsaug_method_count())
        .map(|i| unsafe { CStr::from_ptr(tsaug_method_name(i)) }.to_string_lossy().into_owned())
        .collect();
    assert_eq!(names[0], "none");
    assert!(names.iter().any(|n| n == "rgws"));
    assert!(tsaug_method_name(19).is_null());
}

#[test]
fn load_inspect_expand_and_write() {
    unsafe {
        let train = load("CBF_TRAIN.tsv");
        assert_eq!(tsaug_dataset_len(train), 30);
        let mut n = 0;
        assert_eq!(tsaug_dataset_series_len(train, 0, &mut n), TsaugStatus::Ok);
        assert_eq!(n, 128);
        let mut buf = vec![0.0; n];
        assert_eq!(tsaug_dataset_series(train, 0, buf.as_mut_ptr(), 4), TsaugStatus::OutOfRange);
        assert!(last_error().contains("buffer"));
        assert_eq!(tsaug_dataset_series(train, 0, buf.as_mut_ptr(), n), TsaugStatus::Ok);
        assert!(buf.iter().any(|&v| v != 0.0));
        assert_eq!(tsaug_dataset_series_len(train, 30, &mut n), TsaugStatus::OutOfRange);
        assert!(!tsaug_dataset_label(train, 0).is_null());
        assert!(tsaug_dataset_label(train, 30).is_null());

        assert_eq!(tsaug_dataset_normalize(train, ptr::null_mut()), TsaugStatus::Ok);
        assert_eq!(tsaug_dataset_normalize(train, train), TsaugStatus::InvalidArgument);

        let method = CString::new("dgws").unwrap();
        let params = CString::new("dgw.batch=3; shape.desc_window=5").unwrap();
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(tsaug_expand(train, method.as_ptr(), 4, 42, params.as_ptr(), 1, &mut a), TsaugStatus::Ok);
        assert_eq!(tsaug_expand(train, method.as_ptr(), 4, 42, params.as_ptr(), 2, &mut b), TsaugStatus::Ok);
        assert_eq!(tsaug_dataset_len(a), 120);

        let dir = tempfile::tempdir().unwrap();
        let pa = CString::new(dir.path().join("a.tsv").to_str().unwrap()).unwrap();
        let pb = CString::new(dir.path().join("b.tsv").to_str().unwrap()).unwrap();
        assert_eq!(tsaug_dataset_write(a, pa.as_ptr()), TsaugStatus::Ok);
        assert_eq!(tsaug_dataset_write(b, pb.as_ptr()), TsaugStatus::Ok);
        assert_eq!(
            std::fs::read(dir.path().join("a.tsv")).unwrap(),
            std::fs::read(dir.path().join("b.tsv")).unwrap()
        );
        tsaug_dataset_free(a);
        tsaug_dataset_free(b);
        tsaug_dataset_free(train);
        tsaug_dataset_free(ptr::null_mut());
    }
}

#[test]
fn error_statuses() {
    unsafe {
        let mut ds = ptr::null_mut();
        let missing = CString::new("/nonexistent/x.tsv").unwrap();
        assert_eq!(tsaug_dataset_load(missing.as_ptr(), &mut ds), TsaugStatus::Io);
        assert!(ds.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(tsaug_dataset_load(ptr::null(), &mut ds), TsaugStatus::NullPointer);

        let train = load("CBF_TRAIN.tsv");
        let gan = CString::new("gan").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(tsaug_expand(train, gan.as_ptr(), 4, 0, ptr::null(), 1, &mut out), TsaugStatus::UnknownMethod);
        assert!(last_error().contains("rgws"));
        let jitter = CString::new("jitter").unwrap();
        let bad = CString::new("jitter.sigma=-2").unwrap();
        assert_eq!(tsaug_expand(train, jitter.as_ptr(), 4, 0, bad.as_ptr(), 1, &mut out), TsaugStatus::InvalidArgument);
        assert_eq!(tsaug_expand(ptr::null(), jitter.as_ptr(), 4, 0, ptr::null(), 1, &mut out), TsaugStatus::NullPointer);
        assert!(out.is_null());
        assert_eq!(tsaug_expand(train, jitter.as_ptr(), 4, 0, ptr::null(), 1, &mut out), TsaugStatus::Ok);
        assert_eq!(last_error(), "");
        tsaug_dataset_free(out);
        tsaug_dataset_free(train);
    }
}

#[test]
fn dtw_and_knn() {
    unsafe {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 1.0, 1.0, 2.0];
        let mut d = -1.0;
        assert_eq!(tsaug_dtw_distance(x.as_ptr(), 3, y.as_ptr(), 4, 1.0, &mut d), TsaugStatus::Ok);
        assert_eq!(d, 0.0);
        assert_eq!(tsaug_dtw_distance(x.as_ptr(), 3, x.as_ptr(), 3, 0.0, &mut d), TsaugStatus::Ok);
        assert_eq!(d, 0.0);
        assert_eq!(tsaug_dtw_distance(x.as_ptr(), 0, y.as_ptr(), 4, 1.0, &mut d), TsaugStatus::InvalidArgument);
        assert_eq!(tsaug_dtw_distance(x.as_ptr(), 3, y.as_ptr(), 4, 2.0, &mut d), TsaugStatus::InvalidArgument);

        let train = load("CBF_TRAIN.tsv");
        let test = load("CBF_TEST.tsv");
        assert_eq!(tsaug_dataset_normalize(train, test), TsaugStatus::Ok);
        let mut acc = 0.0;
        assert_eq!(tsaug_knn1_accuracy(train, test, 0.1, &mut acc), TsaugStatus::Ok);
        assert_eq!(acc, 896.0 / 900.0);
        tsaug_dataset_free(train);
        tsaug_dataset_free(test);
    }
}

/// Compiles and runs a C program against the generated header and the
/// static library. Skipped when no C compiler or static library is found.
#[test]
fn c_program_links_against_header() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir: PathBuf = exe.parent().and_then(Path::parent).unwrap().to_path_buf();
    let lib = profile_dir.join("libtsaug_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || std::process::Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: need {} and a C compiler", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "tsaug.h"

int main(int argc, char **argv) {
    TsaugDataset *train = NULL, *out = NULL;
    if (tsaug_dataset_load(argv[1], &train) != TSAUG_STATUS_OK) return 10;
    if (tsaug_expand(train, "gan", 4, 0, NULL, 1, &out) != TSAUG_STATUS_UNKNOWN_METHOD) return 11;
    if (tsaug_expand(train, "window_warp", 4, 7, "window_warp.ratio=0.2", 1, &out) != TSAUG_STATUS_OK) return 12;
    printf("%zu %zu %s\n", tsaug_dataset_len(train), tsaug_dataset_len(out), tsaug_method_name(0));
    tsaug_dataset_free(out);
    tsaug_dataset_free(train);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let status = std::process::Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = std::process::Command::new(&bin).arg(data("CBF_TRAIN.tsv").to_str().unwrap()).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "30 120 none\n");
}
