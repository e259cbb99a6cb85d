use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use blockcs_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bcs_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn devore(p: u32, r: u32) -> *mut BcsMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { bcs_devore(p, r, &mut m) }, BcsStatus::Ok);
    m
}

fn column(m: *const BcsMatrix, j: usize) -> Vec<(u32, i8)> {
    let mut len = 0;
    unsafe {
        assert_eq!(
            bcs_matrix_column(m, j, ptr::null_mut(), ptr::null_mut(), 0, &mut len),
            BcsStatus::Ok
        );
        let (mut rows, mut values) = (vec![0u32; len], vec![0i8; len]);
        assert_eq!(
            bcs_matrix_column(m, j, rows.as_mut_ptr(), values.as_mut_ptr(), len, &mut len),
            BcsStatus::Ok
        );
        rows.into_iter().zip(values).collect()
    }
}

fn ratio(
    f: unsafe extern "C" fn(*const BcsMatrix, *mut u64, *mut u64) -> BcsStatus,
    m: *const BcsMatrix,
) -> (u64, u64) {
    let (mut n, mut d) = (0, 0);
    assert_eq!(
        unsafe { f(m, &mut n, &mut d) },
        BcsStatus::Ok,
        "{}",
        last_error()
    );
    (n, d)
}

#[test]
fn worked_example_through_the_abi() {
    let (a, b) = (devore(2, 1), devore(3, 1));
    let mut phi = ptr::null_mut();
    unsafe {
        assert_eq!(bcs_compose(a, b, 2, &mut phi), BcsStatus::Ok);
        assert_eq!(
            (
                bcs_matrix_rows(phi),
                bcs_matrix_cols(phi),
                bcs_matrix_nnz(phi)
            ),
            (12, 36, 72)
        );
        // second column: tuple (4, 4) -> rows 4 and 6 + 4
        assert_eq!(column(phi, 1), vec![(4, 1), (10, 1)]);
        let mut overlap = 0;
        assert_eq!(bcs_max_overlap(phi, &mut overlap), BcsStatus::Ok);
        assert_eq!(overlap, 1);
        assert_eq!(ratio(bcs_coherence, phi), (1, 2));
        assert_eq!(ratio(bcs_density, phi), (1, 6));

        let mut flipped = ptr::null_mut();
        assert_eq!(bcs_sign_flip(phi, &mut flipped), BcsStatus::Ok);
        assert_eq!(ratio(bcs_coherence, flipped), (1, 2));
        // tuple (4, 1): block 2 sits past position 1
        assert_eq!(column(flipped, 3), vec![(4, 1), (7, -1)]);

        let mut had = ptr::null_mut();
        assert_eq!(bcs_hadamard_expand(phi, 0, &mut had), BcsStatus::Ok);
        assert_eq!((bcs_matrix_rows(had), bcs_matrix_cols(had)), (12, 72));
        assert_eq!(
            bcs_hadamard_expand(phi, 1, &mut ptr::null_mut()),
            BcsStatus::Param
        );
        assert!(last_error().contains("admissible"), "{}", last_error());
        // only binary inputs expand
        assert_eq!(
            bcs_hadamard_expand(flipped, 0, &mut ptr::null_mut()),
            BcsStatus::Param
        );

        for m in [a, b, phi, flipped, had] {
            bcs_matrix_free(m);
        }
    }
}

#[test]
fn plan_and_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m60.mtx").to_str().unwrap()).unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(bcs_plan_execute(60, 1, &mut m), BcsStatus::Ok);
        assert_eq!((bcs_matrix_rows(m), bcs_matrix_cols(m)), (60, 900));
        assert_eq!(bcs_matrix_write(m, path.as_ptr()), BcsStatus::Ok);

        let mut back = ptr::null_mut();
        assert_eq!(bcs_matrix_read(path.as_ptr(), &mut back), BcsStatus::Ok);
        assert_eq!(bcs_matrix_cols(back), 900);
        assert_eq!(column(back, 899), column(m, 899));

        assert_eq!(
            bcs_plan_execute(15, 1, &mut ptr::null_mut()),
            BcsStatus::Param
        );
        assert!(last_error().contains("different from p, p², pq"));

        bcs_matrix_free(m);
        bcs_matrix_free(back);
    }
}

#[test]
fn error_codes() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(bcs_devore(4, 1, &mut m), BcsStatus::Param);
        assert!(m.is_null());
        assert!(last_error().contains("p must be prime"));
        assert_eq!(bcs_devore(3, 1, ptr::null_mut()), BcsStatus::Null);

        let missing = CString::new(dir.path().join("none.mtx").to_str().unwrap()).unwrap();
        assert_eq!(bcs_matrix_read(missing.as_ptr(), &mut m), BcsStatus::Io);

        let bad = dir.path().join("bad.mtx");
        std::fs::write(&bad, "not a matrix\n").unwrap();
        std::fs::write(bad.with_extension("meta.json"), "{}").unwrap();
        let bad = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(bcs_matrix_read(bad.as_ptr(), &mut m), BcsStatus::Malformed);

        let a = devore(3, 1);
        let mut len = 0;
        assert_eq!(
            bcs_matrix_column(a, 9, ptr::null_mut(), ptr::null_mut(), 0, &mut len),
            BcsStatus::Param
        );
        let mut row = [0u32; 1];
        let mut val = [0i8; 1];
        assert_eq!(
            bcs_matrix_column(a, 0, row.as_mut_ptr(), val.as_mut_ptr(), 1, &mut len),
            BcsStatus::Param
        );
        assert_eq!(len, 3);
        assert_eq!(bcs_max_overlap(ptr::null(), &mut 0), BcsStatus::Null);
        assert_eq!(bcs_matrix_rows(ptr::null()), 0);

        assert_eq!(bcs_devore(3, 1, &mut m), BcsStatus::Ok);
        assert_eq!(last_error(), "");
        bcs_matrix_free(m);
        bcs_matrix_free(a);
        bcs_matrix_free(ptr::null_mut());
    }
}

#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libblockcs_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
