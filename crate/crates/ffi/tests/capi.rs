use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use pavecrack_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pc_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn cpath(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

/// 96x64 background at level 180 with a dark horizontal band.
fn scene_levels() -> (usize, usize, Vec<u8>) {
    let (w, h) = (96, 64);
    let levels = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            if (30..34).contains(&y) && (10..86).contains(&x) {
                50
            } else {
                180
            }
        })
        .collect();
    (w, h, levels)
}

#[test]
fn detect_and_evaluate_round_trip() {
    let (w, h, levels) = scene_levels();
    unsafe {
        let mut img = ptr::null_mut();
        assert_eq!(
            pc_image_from_u8(w, h, levels.as_ptr(), levels.len(), &mut img),
            PcStatus::Ok
        );
        assert_eq!((pc_image_width(img), pc_image_height(img)), (w, h));

        let mut mask = ptr::null_mut();
        assert_eq!(pc_detect(img, ptr::null(), &mut mask), PcStatus::Ok);
        assert_eq!((pc_mask_width(mask), pc_mask_height(mask)), (w, h));
        let n = pc_mask_count(mask);
        assert!(n > 200, "{n}");

        let mut bits = vec![0u8; w * h];
        assert_eq!(pc_mask_copy_bits(mask, bits.as_mut_ptr(), bits.len()), PcStatus::Ok);
        assert_eq!(bits.iter().filter(|&&b| b == 1).count(), n);
        assert_eq!(
            pc_mask_copy_bits(mask, bits.as_mut_ptr(), 3),
            PcStatus::InvalidArgument
        );

        let dir = tempfile::tempdir().unwrap();
        let path = cpath(&dir.path().join("mask.pgm"));
        assert_eq!(pc_mask_save_pgm(mask, path.as_ptr()), PcStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(pc_mask_load_pgm(path.as_ptr(), &mut again), PcStatus::Ok);

        let mut rep = PcEvalReport::default();
        assert_eq!(pc_evaluate(mask, again, 2.0, &mut rep), PcStatus::Ok);
        assert_eq!(rep.sm, 100.0);
        assert_eq!(rep.hausdorff, 0.0);
        assert_eq!(rep.detected_count, n);

        pc_mask_free(again);
        pc_mask_free(mask);
        pc_image_free(img);
    }
}

#[test]
fn config_handles() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(pc_config_default(&mut cfg), PcStatus::Ok);
        pc_config_free(cfg);

        let text = CString::new("singh_w = 31\nsigma_stick2 = 12").unwrap();
        assert_eq!(pc_config_from_toml(text.as_ptr(), &mut cfg), PcStatus::Ok);
        pc_config_free(cfg);

        let bad = CString::new("singh_ww = 31").unwrap();
        assert_eq!(pc_config_from_toml(bad.as_ptr(), &mut cfg), PcStatus::Config);
        assert!(cfg.is_null());
        assert!(last_error().contains("singh_ww"), "{}", last_error());

        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.toml");
        std::fs::write(&file, "singh_w = 50\n").unwrap();
        assert_eq!(
            pc_config_load(cpath(&file).as_ptr(), &mut cfg),
            PcStatus::Config
        );
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut img = ptr::null_mut();
        let missing = CString::new("/nonexistent/scene.pgm").unwrap();
        assert_eq!(pc_image_load_pgm(missing.as_ptr(), &mut img), PcStatus::Io);
        assert!(last_error().contains("/nonexistent/scene.pgm"));

        assert_eq!(pc_image_load_pgm(ptr::null(), &mut img), PcStatus::NullPointer);
        let levels = [0u8; 6];
        assert_eq!(
            pc_image_from_u8(4, 2, levels.as_ptr(), levels.len(), &mut img),
            PcStatus::InvalidArgument
        );

        let dir = tempfile::tempdir().unwrap();
        let junk = dir.path().join("junk.pgm");
        std::fs::write(&junk, b"P7\n1 1\n255\n\0").unwrap();
        assert_eq!(
            pc_image_load_pgm(cpath(&junk).as_ptr(), &mut img),
            PcStatus::Format
        );

        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        for (size, out) in [(4usize, &mut a), (5, &mut b)] {
            let f = dir.path().join(format!("m{size}.pgm"));
            let mut data = format!("P5\n{size} {size}\n255\n").into_bytes();
            data.extend(std::iter::repeat(255).take(size * size));
            std::fs::write(&f, data).unwrap();
            assert_eq!(pc_mask_load_pgm(cpath(&f).as_ptr(), out), PcStatus::Ok);
        }
        let mut rep = PcEvalReport::default();
        assert_eq!(pc_evaluate(a, b, 2.0, &mut rep), PcStatus::DimensionMismatch);
        assert_eq!(pc_evaluate(a, a, -1.0, &mut rep), PcStatus::InvalidParameter);
        assert_eq!(pc_evaluate(a, ptr::null(), 2.0, &mut rep), PcStatus::NullPointer);
        pc_mask_free(a);
        pc_mask_free(b);

        pc_image_free(ptr::null_mut());
        pc_mask_free(ptr::null_mut());
        pc_config_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pavecrack.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["pc_detect", "pc_evaluate", "pc_last_error_message", "PC_STATUS_PANIC"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    for (compiler, ext) in [("cc", "c"), ("c++", "cpp")] {
        let src = dir.path().join(format!("probe.{ext}"));
        std::fs::write(
            &src,
            format!(
                "#include \"{}\"\nint main(void) {{ PcStatus s = PC_STATUS_OK; return (int)s; }}\n",
                header.display()
            ),
        )
        .unwrap();
        let status = match Command::new(compiler).arg("-fsyntax-only").arg(&src).status() {
            Ok(s) => s,
            Err(_) => {
                eprintln!("{compiler} not available, skipping");
                continue;
            }
        };
        assert!(status.success(), "{compiler} rejected the header");
    }
}
