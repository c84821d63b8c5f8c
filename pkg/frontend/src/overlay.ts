// Overlay geometry and status coloring for the side-by-side view. Pure
// functions so the math is testable without a DOM.

import type { Criterion, PairVerification, TextRegion } from './types';

export type CheckStatus = 'pass' | 'fail' | 'pending';

export interface OverlayBox {
  left: number;
  top: number;
  width: number;
  height: number;
  label: string;
  status: CheckStatus;
}

/**
 * Per-criterion badge state, mirrored from the server's verification
 * payload. The client never upgrades or invents a status; in particular
 * the visual criterion stays pending until a human decides.
 */
export function criterionBadges(v: PairVerification): Record<Criterion, CheckStatus> {
  return {
    labels: v.labels_preserved ? 'pass' : 'fail',
    topology: v.topology_ok ? 'pass' : 'fail',
    visual: v.visual === 'pass' ? 'pass' : v.visual === 'fail' ? 'fail' : 'pending',
  };
}

/** A region fails when its text is among the labels OCR could not find. */
export function regionStatus(region: TextRegion, v: PairVerification): CheckStatus {
  const wanted = region.text.trim().toLowerCase();
  const missing = v.missing_labels.some((m) => m.trim().toLowerCase() === wanted);
  return missing ? 'fail' : 'pass';
}

/**
 * Uniform scale factor that fits a natural-size image into a display slot.
 * Both images of a pair share dimensions, so using the same slot size for
 * each keeps them at equal scale.
 */
export function fitScale(
  naturalWidth: number,
  naturalHeight: number,
  displayWidth: number,
  displayHeight: number,
): number {
  if (naturalWidth <= 0 || naturalHeight <= 0) return 1;
  return Math.min(displayWidth / naturalWidth, displayHeight / naturalHeight);
}

/** Project label bboxes from image pixels into display coordinates. */
export function overlayBoxes(
  regions: TextRegion[],
  verification: PairVerification,
  scale: number,
): OverlayBox[] {
  return regions.map((region) => {
    const [x, y, w, h] = region.bbox;
    return {
      left: x * scale,
      top: y * scale,
      width: w * scale,
      height: h * scale,
      label: region.text,
      status: regionStatus(region, verification),
    };
  });
}
