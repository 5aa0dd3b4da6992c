//! Full pipeline runs across input formats and ROI sources.

use radiomics::io::{load_mask, load_volume, write_nifti, write_raw, NiftiDatatype, RawDatatype};
use radiomics::pipeline::{preset, run_pipeline, RoiSource};
use radiomics::synthetic::synthetic_ct;
use radiomics::volume::{parse_contours, GridGeometry, ImageVolume, RoiMask};

#[test]
fn raw_and_nifti_inputs_give_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    // NIfTI stores spacing as float32, so pick values it holds exactly.
    let (image, mask) = synthetic_ct([20, 18, 12], [0.75, 0.75, 2.0], 9);
    let mask_volume = ImageVolume::new(mask.geometry, mask.labels.iter().map(|&l| f64::from(l)).collect()).unwrap();
    let (nii, hdr) = (dir.path().join("ct.nii.gz"), dir.path().join("ct.hdr"));
    write_nifti(&nii, &image, NiftiDatatype::Int16).unwrap();
    write_raw(&hdr, &image, RawDatatype::Int16).unwrap();
    let mask_path = dir.path().join("roi.hdr");
    write_raw(&mask_path, &mask_volume, RawDatatype::Uint8).unwrap();

    let cfg = preset("B").unwrap();
    let mut reports = Vec::new();
    for path in [&nii, &hdr] {
        let img = load_volume(path).unwrap().image;
        let roi = load_mask(&mask_path, &img).unwrap();
        assert_eq!(roi.labels, mask.labels);
        reports.push(run_pipeline(&img, &RoiSource::Mask(roi), &cfg).unwrap().0);
    }
    assert_eq!(reports[0], reports[1]);
    assert!(reports[0].records.iter().filter(|r| r.value.value().is_some()).count() > 100);
}

#[test]
fn contours_and_their_mask_give_the_same_report() {
    let g = GridGeometry::new([12, 12, 4], [1.0; 3], [0.0; 3]).unwrap();
    let image = ImageVolume::new(g, (0..g.len()).map(|i| ((i * 37) % 23) as f64).collect()).unwrap();
    let mut text = String::new();
    for z in 0..4 {
        text.push_str(&format!("slice z={z}\n2.5 2.5\n9.5 2.5\n9.5 8.5\n2.5 8.5\n\n"));
    }
    let contours = parse_contours(&text).unwrap();
    let labels = (0..g.len())
        .map(|i| {
            let [x, y, _] = g.position(i);
            u8::from((3..=9).contains(&x) && (3..=8).contains(&y))
        })
        .collect();
    let mask = RoiMask::new(g, labels).unwrap();
    let cfg = preset("A").unwrap();
    let from_contours = run_pipeline(&image, &RoiSource::Contours(contours), &cfg).unwrap().0;
    let from_mask = run_pipeline(&image, &RoiSource::Mask(mask), &cfg).unwrap().0;
    assert_eq!(from_contours, from_mask);
}
