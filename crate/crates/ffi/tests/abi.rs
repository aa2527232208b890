use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use coopnav_ffi::*;

fn last_error() -> String {
    let p = coopnav_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn recorder_lifecycle() {
    unsafe {
        let mut rec = ptr::null_mut();
        assert_eq!(coopnav_recorder_new(0.5, &mut rec), CoopnavStatus::Ok);
        let mut cm = 0.0;
        assert_eq!(coopnav_recorder_metric(rec, &mut cm), CoopnavStatus::NoObservations);
        assert!(last_error().contains("no observations"));

        for v in [0.0, 0.0, 1.0] {
            assert_eq!(coopnav_recorder_push(rec, v), CoopnavStatus::Ok);
        }
        assert_eq!(coopnav_recorder_metric(rec, &mut cm), CoopnavStatus::Ok);
        // weights 0.25, 0.5, 1
        assert!((cm - 1.0 / 1.75).abs() < 1e-15);

        let mut n = 0usize;
        assert_eq!(coopnav_recorder_reset(rec), CoopnavStatus::Ok);
        assert_eq!(coopnav_recorder_len(rec, &mut n), CoopnavStatus::Ok);
        assert_eq!(n, 0);
        coopnav_recorder_free(rec);
    }
}

#[test]
fn recorder_signs_by_robot_side() {
    unsafe {
        let mut rec = ptr::null_mut();
        assert_eq!(coopnav_recorder_new(0.98, &mut rec), CoopnavStatus::Ok);
        let path = [0.0, 1.0, 10.0, 1.0];
        let mut v = 0.0;
        assert_eq!(coopnav_recorder_record(rec, 5.0, 1.5, path.as_ptr(), 2, 5.0, 0.5, &mut v), CoopnavStatus::Ok);
        assert_eq!(v, 0.5);
        assert_eq!(coopnav_recorder_record(rec, 5.0, 1.5, path.as_ptr(), 2, 5.0, 1.8, &mut v), CoopnavStatus::Ok);
        assert_eq!(v, -0.5);
        coopnav_recorder_free(rec);
    }
}

#[test]
fn invalid_arguments_report_errors() {
    unsafe {
        let mut rec = ptr::null_mut();
        assert_eq!(coopnav_recorder_new(1.0, &mut rec), CoopnavStatus::InvalidArgument);
        assert!(last_error().contains("gamma"));
        assert!(rec.is_null());
        assert_eq!(coopnav_recorder_new(0.9, ptr::null_mut()), CoopnavStatus::NullPointer);
        assert_eq!(coopnav_recorder_push(ptr::null_mut(), 1.0), CoopnavStatus::NullPointer);
        let mut out = 0.0;
        assert_eq!(coopnav_discounted_mean(ptr::null(), 0, 0.5, &mut out), CoopnavStatus::NullPointer);
        coopnav_recorder_free(ptr::null_mut());
        coopnav_run_free(ptr::null_mut());
        coopnav_string_free(ptr::null_mut());
    }
}

#[test]
fn predicates_and_first_checkpoint() {
    let th = coopnav_thresholds_default();
    assert_eq!(th.gamma, 0.98);
    let c = CoopnavClearances {
        d_h: 0.4,
        d_oh: 0.8,
        d_or: 0.25,
        d_hr: 1.1,
    };
    let mut p = CoopnavPredicates {
        human_needs_to_contribute: false,
        human_is_constrained: false,
        robot_is_constrained: false,
    };
    let mut cue = CoopnavCue {
        kind: CoopnavCueKind::Silent,
        direction: CoopnavDirection::Left,
        has_direction: false,
    };
    unsafe {
        assert_eq!(coopnav_assess_situation(&c, &th, &mut p), CoopnavStatus::Ok);
        assert!(p.human_needs_to_contribute && p.human_is_constrained && p.robot_is_constrained);
        assert_eq!(coopnav_first_checkpoint(&p, CoopnavDirection::Right, &mut cue), CoopnavStatus::Ok);
        assert_eq!(cue.kind, CoopnavCueKind::IndicateWillDockIfNeeded);
        assert!(!cue.has_direction);
        p.robot_is_constrained = false;
        assert_eq!(coopnav_first_checkpoint(&p, CoopnavDirection::Right, &mut cue), CoopnavStatus::Ok);
        assert_eq!(cue.kind, CoopnavCueKind::InformDirection);
        assert!(cue.has_direction);
        assert_eq!(cue.direction, CoopnavDirection::Right);
    }
}

#[test]
fn builtin_run_through_the_abi() {
    unsafe {
        let name = CString::new("open_facilitating").unwrap();
        let mut run = ptr::null_mut();
        assert_eq!(coopnav_run_builtin(name.as_ptr(), &mut run), CoopnavStatus::Ok);
        let mut cm = 0.0;
        assert_eq!(coopnav_run_final_cm(run, &mut cm), CoopnavStatus::Ok);
        assert!(cm > 0.4);
        let mut timed_out = true;
        assert_eq!(coopnav_run_timed_out(run, &mut timed_out), CoopnavStatus::Ok);
        assert!(!timed_out);

        let mut s = ptr::null_mut();
        assert_eq!(coopnav_run_events_json(run, &mut s), CoopnavStatus::Ok);
        let events: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        coopnav_string_free(s);
        let last = events.as_array().unwrap().last().unwrap();
        assert_eq!(last["kind"], "ThankYou");

        assert_eq!(coopnav_run_trace_jsonl(run, &mut s), CoopnavStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        coopnav_string_free(s);
        let trace = coopnav::cli::trace::read_trace(text.as_bytes()).unwrap();
        assert_eq!(trace.final_cm, cm);
        coopnav_run_free(run);

        let bad = CString::new("nope").unwrap();
        assert_eq!(coopnav_run_builtin(bad.as_ptr(), &mut run), CoopnavStatus::InvalidArgument);
        let broken = CString::new("[world]\nwidth = -1\n").unwrap();
        assert_eq!(coopnav_run_config(broken.as_ptr(), &mut run), CoopnavStatus::Config);
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = dir.join("include");
    assert!(header_dir.join("coopnav.h").exists(), "build script did not write the header");
    let source = dir.join("tests").join("c").join("smoke.c");
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.join("libcoopnav_ffi.a");
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");

    let mut cc = Command::new("cc");
    cc.args(["-std=c99", "-Wall", "-Werror", "-I"]).arg(&header_dir).arg(&source);
    if lib.exists() {
        cc.arg(&lib).args(["-lpthread", "-ldl", "-lm", "-o"]).arg(&exe);
    } else {
        cc.arg("-fsyntax-only");
    }
    let Ok(status) = cc.status() else {
        eprintln!("no C compiler available, skipping");
        return;
    };
    assert!(status.success(), "C compilation failed");
    if lib.exists() {
        let run = Command::new(&exe).status().unwrap();
        assert_eq!(run.code(), Some(0));
    }
}
