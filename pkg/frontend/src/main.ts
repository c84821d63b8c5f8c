// Page bootstrap: wires the controller to a two-panel compare view with
// label overlays, criteria controls, and a stats footer. All review state
// lives in the controller; this file only renders it.

import { ReviewApi } from './api';
import { FIRST_ATTEMPT_REFERENCE, ReviewController, type ViewState } from './controller';
import { criterionBadges, fitScale, overlayBoxes } from './overlay';
import { CRITERIA, type Candidate } from './types';

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get('service') ?? '';
const reviewer = params.get('reviewer') ?? 'anonymous';

const api = new ReviewApi(baseUrl, reviewer);
const controller = new ReviewController(api);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function imagePanel(title: string, src: string, candidate: Candidate, visible: boolean): HTMLElement {
  const panel = el('figure', 'panel');
  panel.appendChild(el('figcaption', 'panel-title', title));
  const frame = el('div', 'frame');
  frame.style.position = 'relative';
  const image = el('img');
  image.src = src;
  image.alt = `${title} for ${candidate.prompt_id}`;
  image.addEventListener('load', () => {
    if (!visible) return;
    const scale = fitScale(
      image.naturalWidth,
      image.naturalHeight,
      image.clientWidth,
      image.clientHeight,
    );
    for (const box of overlayBoxes(candidate.regions ?? [], candidate.verification, scale)) {
      const marker = el('div', `region region-${box.status}`);
      marker.style.position = 'absolute';
      marker.style.left = `${box.left}px`;
      marker.style.top = `${box.top}px`;
      marker.style.width = `${box.width}px`;
      marker.style.height = `${box.height}px`;
      marker.title = box.label;
      frame.appendChild(marker);
    }
  });
  frame.appendChild(image);
  panel.appendChild(frame);
  return panel;
}

function badgeRow(candidate: Candidate): HTMLElement {
  const row = el('div', 'badges');
  const badges = criterionBadges(candidate.verification);
  for (const criterion of CRITERIA) {
    row.appendChild(el('span', `badge badge-${badges[criterion]}`, `${criterion}: ${badges[criterion]}`));
  }
  if (!candidate.verification.labels_preserved) {
    row.appendChild(
      el('span', 'badge-note', `missing: ${candidate.verification.missing_labels.join(', ')}`),
    );
  }
  return row;
}

function controls(state: ViewState): HTMLElement {
  const box = el('div', 'controls');

  const acceptButton = el('button', state.verdict === 'accept' ? 'verdict active' : 'verdict', 'Accept');
  acceptButton.addEventListener('click', () => controller.chooseVerdict('accept'));
  const rejectButton = el('button', state.verdict === 'reject' ? 'verdict active' : 'verdict', 'Reject');
  rejectButton.addEventListener('click', () => controller.chooseVerdict('reject'));
  box.append(acceptButton, rejectButton);

  if (state.verdict === 'reject') {
    const fieldset = el('fieldset', 'criteria');
    fieldset.appendChild(el('legend', undefined, 'failed criteria'));
    for (const criterion of CRITERIA) {
      const label = el('label');
      const checkbox = el('input');
      checkbox.type = 'checkbox';
      checkbox.checked = state.selectedCriteria.includes(criterion);
      checkbox.addEventListener('change', () => controller.toggleCriterion(criterion));
      label.append(checkbox, document.createTextNode(` ${criterion}`));
      fieldset.appendChild(label);
    }
    box.appendChild(fieldset);

    const strengthLabel = el('label', 'strength', `retry strength ${state.strength.toFixed(2)} `);
    const slider = el('input');
    slider.type = 'range';
    slider.min = '0.05';
    slider.max = '1';
    slider.step = '0.05';
    slider.value = String(state.strength);
    slider.addEventListener('input', () => controller.setStrength(Number(slider.value)));
    strengthLabel.appendChild(slider);
    box.appendChild(strengthLabel);
  }

  const overlayToggle = el('button', 'toggle', state.overlaysVisible ? 'Hide overlays' : 'Show overlays');
  overlayToggle.addEventListener('click', () => controller.toggleOverlays());
  box.appendChild(overlayToggle);

  const submit = el('button', 'submit', state.submitting ? 'Submitting...' : 'Submit');
  submit.disabled = !controller.canSubmit();
  submit.addEventListener('click', () => void controller.submit());
  box.appendChild(submit);
  return box;
}

function footer(state: ViewState): HTMLElement {
  const bar = el('footer', 'stats');
  if (state.stats) {
    const rate = state.stats.first_attempt_pass_rate;
    const shown = rate === null ? 'n/a' : `${(rate * 100).toFixed(1)}%`;
    bar.appendChild(
      el(
        'span',
        undefined,
        `pending ${state.stats.pending} | accepted ${state.stats.accepted} | ` +
          `rejected ${state.stats.rejected} | regen ${state.stats.regen_pending} | ` +
          `first-attempt ${shown} (reference ${(FIRST_ATTEMPT_REFERENCE * 100).toFixed(0)}%)`,
      ),
    );
  }
  return bar;
}

function render(state: ViewState): void {
  const root = document.getElementById('app');
  if (!root) return;
  root.replaceChildren();

  if (state.notice) root.appendChild(el('div', 'banner notice', state.notice));
  if (state.screen === 'error') {
    const banner = el('div', 'banner error');
    banner.appendChild(el('span', undefined, `service unreachable: ${state.errorMessage ?? ''} `));
    const retryButton = el('button', undefined, 'Retry');
    retryButton.addEventListener('click', () => void controller.retry());
    banner.appendChild(retryButton);
    root.appendChild(banner);
    root.appendChild(footer(state));
    return;
  }
  if (state.screen === 'loading') {
    root.appendChild(el('div', 'banner', 'loading...'));
    return;
  }
  if (state.screen === 'idle' || state.candidate === null) {
    root.appendChild(el('div', 'banner', 'no pending candidates'));
    root.appendChild(footer(state));
    return;
  }

  const candidate = state.candidate;
  root.appendChild(
    el(
      'header',
      'pair-header',
      `${candidate.pair_id} (attempt ${candidate.attempt}, strength ${candidate.style.strength})`,
    ),
  );
  root.appendChild(badgeRow(candidate));

  const compare = el('div', 'compare');
  compare.append(
    imagePanel('programmatic render', api.progImageUrl(candidate.pair_id), candidate, state.overlaysVisible),
    imagePanel('stylized candidate', api.candidateImageUrl(candidate.pair_id), candidate, state.overlaysVisible),
  );
  root.appendChild(compare);
  root.appendChild(controls(state));
  root.appendChild(footer(state));
}

controller.subscribe(render);
void controller.loadNext();
