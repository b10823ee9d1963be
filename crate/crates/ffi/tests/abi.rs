use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use pmcad_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    pm_string_free(s);
    out
}

#[test]
fn circle_cad_through_handles() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(pm_formula_parse(c("vars x, y. x^2 + y^2 - 1 < 0").as_ptr(), &mut f), PmStatus::Ok);
        assert_eq!(pm_formula_nvars(f), 2);
        let mut cad = ptr::null_mut();
        assert_eq!(pm_cad_build(f, 0, &mut cad), PmStatus::Ok);
        assert_eq!(pm_cad_cell_count(cad), 13);
        let mut json = ptr::null_mut();
        assert_eq!(pm_cad_to_json(cad, &mut json), PmStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(v["cells"].as_array().unwrap().len(), 13);
        pm_cad_free(cad);
        pm_formula_free(f);
    }
}

#[test]
fn qe_and_eval() {
    unsafe {
        let mut f = ptr::null_mut();
        let st = pm_formula_parse_with_order(c("x,y").as_ptr(), c("(E y)[x^2 + y^2 - 1 = 0]").as_ptr(), &mut f);
        assert_eq!(st, PmStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(pm_qe(f, 0, &mut g), PmStatus::Ok);
        for (x, want) in [("0", true), ("1", true), ("3/2", false), ("-1", true)] {
            let vals = [c(x), c("0")];
            let ptrs: Vec<_> = vals.iter().map(|s| s.as_ptr()).collect();
            let mut b = false;
            assert_eq!(pm_formula_eval(g, ptrs.as_ptr(), 2, &mut b), PmStatus::Ok);
            assert_eq!(b, want, "x = {x}");
        }
        let mut t = ptr::null_mut();
        assert_eq!(pm_formula_to_text(g, &mut t), PmStatus::Ok);
        assert!(take(t).starts_with("vars x, y."));
        pm_formula_free(g);
        pm_formula_free(f);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(pm_formula_parse(c("vars x. x^^2 > 0").as_ptr(), &mut f), PmStatus::Usage);
        assert!(f.is_null());
        let msg = CStr::from_ptr(pm_last_error()).to_str().unwrap();
        assert!(msg.contains("syntax"), "{msg}");
        assert_eq!(pm_formula_parse(ptr::null(), &mut f), PmStatus::NullPointer);
        assert_eq!(pm_formula_generate(c("nope").as_ptr(), ptr::null(), &mut f), PmStatus::Usage);

        assert_eq!(pm_formula_parse(c("vars x, y. x^2 + y^2 - 1 < 0").as_ptr(), &mut f), PmStatus::Ok);
        let mut cad = ptr::null_mut();
        assert_eq!(pm_cad_build(f, 5, &mut cad), PmStatus::ResourceLimit);
        pm_formula_free(f);

        assert_eq!(pm_formula_parse(c("vars x, y, w, z, t. t^2 - x*z - y*w > 0").as_ptr(), &mut f), PmStatus::Ok);
        assert_eq!(pm_cad_build(f, 0, &mut cad), PmStatus::NotWellOriented);
        pm_formula_free(f);
        pm_formula_free(ptr::null_mut());
        pm_cad_free(ptr::null_mut());
    }
}

#[test]
fn generated_formulation() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(pm_formula_generate(c("yangzeng").as_ptr(), ptr::null(), &mut f), PmStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(pm_qe(f, 0, &mut g), PmStatus::Ok);
        for (l, want) in [("-1", true), ("0", true), ("2", true), ("3", false)] {
            let vals = [c(l), c("0")];
            let ptrs: Vec<_> = vals.iter().map(|s| s.as_ptr()).collect();
            let mut b = false;
            assert_eq!(pm_formula_eval(g, ptrs.as_ptr(), 2, &mut b), PmStatus::Ok);
            assert_eq!(b, want, "L = {l}");
        }
        pm_formula_free(g);
        pm_formula_free(f);
        assert!(CStr::from_ptr(pm_version()).to_str().unwrap().starts_with("0."));
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/pmcad.h");
    let src = std::env::temp_dir().join("pmcad_header_check.c");
    std::fs::write(
        &src,
        "#include <pmcad.h>\nint main(void) { PmFormula *f = 0; PmStatus s = pm_formula_parse(\"vars x. x > 0\", &f); \
         return s == PM_STATUS_OK ? 0 : (int)s; }\n",
    )
    .unwrap();
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["pm_formula_parse", "pm_qe", "pm_cad_build", "pm_last_error", "PM_STATUS_RESOURCE_LIMIT"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler; header content checked only");
        return;
    };
    assert!(status.success());
}
