//! End-to-end checks through the C ABI: drive a real computation through
//! the exported functions, and compile-check the handwritten header.

use std::ffi::{c_char, CStr};
use std::process::Command;

use chartax_ffi::*;

#[test]
fn extremal_instance_through_the_abi() {
    unsafe {
        let mut table: *mut ChartaxPrimeTable = std::ptr::null_mut();
        assert_eq!(chartax_prime_table_new(1_000_000, &mut table), CHARTAX_OK);
        let mut group: *mut ChartaxGroup = std::ptr::null_mut();
        assert_eq!(chartax_group_new(13, &mut group), CHARTAX_OK);
        let mut phi = 0;
        chartax_group_phi(group, &mut phi);
        assert_eq!(phi, 12);

        // find an order-3 character by scanning ids, as a C caller would
        let mut id3 = None;
        for id in 0..phi {
            let mut order = 0;
            assert_eq!(chartax_char_order(group, id, &mut order), CHARTAX_OK);
            if order == 3 {
                id3 = Some(id);
                break;
            }
        }
        let id3 = id3.expect("order-3 character mod 13");

        let mut json: *mut c_char = std::ptr::null_mut();
        assert_eq!(
            chartax_theorem1_check_json(
                table,
                group,
                id3,
                0.0,
                1.0,
                13,
                1_000_000,
                CHARTAX_SUPPORT_RPOWER,
                3,
                &mut json
            ),
            CHARTAX_OK
        );
        let verdict: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        chartax_string_free(json);
        assert_eq!(verdict["delta_star"], 0.0);
        assert_eq!(verdict["order"], 3);
        // cubic-residue support mass is close to L/3
        let mass = verdict["support_mass"].as_f64().unwrap();
        let l = verdict["l_value"].as_f64().unwrap();
        assert!((mass - l / 3.0).abs() < 0.2 * l / 3.0);

        chartax_group_free(group);
        chartax_prime_table_free(table);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/chartax.h");
    let Ok(out) = Command::new("cc")
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-xc",
            header,
        ])
        .output()
    else {
        eprintln!("cc not available; skipping header syntax check");
        return;
    };
    assert!(
        out.status.success(),
        "header failed to compile:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
