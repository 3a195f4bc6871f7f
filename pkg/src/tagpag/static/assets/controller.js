/**
 * Application controller: owns session state, renders into a root element,
 * and turns keyboard/mouse input into API calls.
 *
 * Commit discipline: at most one PUT is in flight; further commits chain
 * behind it in order. Label state is applied optimistically and rolled back
 * if the server rejects the write, with a retry banner that re-issues the
 * same commit. A failed load or commit never discards local drafts.
 */
import { exportUrl, scrapedHtmlUrl } from './api.js';
import { labelColorClass, segmentByByteSpans } from './highlight.js';
import { isTextField, routeKey, shortcutMap } from './shortcuts.js';
function el(tag, attrs = {}, ...children) {
    const node = document.createElement(tag);
    for (const [name, value] of Object.entries(attrs)) {
        node.setAttribute(name, value);
    }
    node.append(...children);
    return node;
}
export class AnnotatorApp {
    constructor(root, api, annotatorId) {
        this.position = 0;
        this.task = null;
        this.pendingLabels = new Set();
        this.activeTab = 'cleaned';
        this.shortcuts = new Map();
        this.drafts = new Map();
        this.waybackCache = new Map();
        this.commitChain = Promise.resolve();
        this.referenceVisible = false;
        this.keydownListener = (event) => this.handleKey(event);
        // -- banners and notices ------------------------------------------------------
        this.bannerRetry = null;
        this.root = root;
        this.api = api;
        this.annotatorId = annotatorId;
    }
    async start() {
        this.config = await this.api.getConfig();
        this.session = await this.api.getSession(this.annotatorId);
        this.shortcuts = shortcutMap(this.config.labels);
        this.renderShell();
        this.root.ownerDocument.addEventListener('keydown', this.keydownListener);
        if (this.session.task_ids.length === 0) {
            this.showNotice('The corpus is empty; nothing to annotate.');
            return;
        }
        await this.goTo(this.session.first_unannotated ?? 0);
    }
    stop() {
        this.root.ownerDocument.removeEventListener('keydown', this.keydownListener);
    }
    get total() {
        return this.session.task_ids.length;
    }
    get currentTaskId() {
        return this.session.task_ids[this.position];
    }
    // -- navigation -------------------------------------------------------------
    async goTo(position) {
        if (position < 0 || position >= this.total)
            return;
        this.position = position;
        const taskId = this.session.task_ids[position];
        let payload;
        try {
            payload = await this.api.getTask(taskId, this.annotatorId);
        }
        catch (error) {
            this.showBanner(`Could not load task ${taskId}: ${describe(error)}`, () => this.goTo(position));
            return;
        }
        this.hideBanner();
        this.task = payload;
        this.pendingLabels = new Set(this.config.mode === 'multi' ? (payload.own_annotation?.labels ?? []) : []);
        if (!this.drafts.has(taskId)) {
            const seed = payload.extraction.clean_text || payload.extraction.raw_text;
            this.drafts.set(taskId, {
                comment: payload.own_annotation?.comment ?? '',
                editedText: payload.own_annotation?.edited_text ?? seed,
                editedDirty: false,
                seed,
            });
        }
        this.activeTab = payload.html_missing
            ? 'url'
            : payload.extraction.clean_text
                ? 'cleaned'
                : 'raw';
        this.renderTask();
        void this.refreshWayback(taskId, false);
    }
    async next() {
        await this.goTo(this.position + 1);
    }
    async previous() {
        await this.goTo(this.position - 1);
    }
    async jumpToUnannotated() {
        let session;
        try {
            session = await this.api.getSession(this.annotatorId);
        }
        catch (error) {
            this.showBanner(`Could not refresh session: ${describe(error)}`, () => this.jumpToUnannotated());
            return;
        }
        this.session = session;
        this.renderProgress();
        if (session.first_unannotated === null) {
            this.showNotice('Every task is annotated.');
            return;
        }
        await this.goTo(session.first_unannotated);
    }
    // -- committing -------------------------------------------------------------
    /** Queue a commit of the given labels for the current task. */
    commitLabels(labels) {
        const taskId = this.currentTaskId;
        const draft = this.drafts.get(taskId);
        const previous = this.task?.own_annotation ?? null;
        const body = {
            labels,
            comment: draft?.comment ?? '',
            edited_text: this.effectiveEditedText(taskId),
        };
        const run = this.commitChain.then(async () => {
            try {
                const result = await this.api.putAnnotation(taskId, this.annotatorId, body);
                this.session.counts = result.counts;
                if (this.task && this.task.task.task_id === taskId) {
                    this.task.own_annotation = result.annotation;
                }
                this.renderProgress();
                this.hideBanner();
                if (this.config.mode === 'single' && result.next_position !== null) {
                    await this.goTo(result.next_position);
                }
                else if (this.config.mode === 'single') {
                    this.renderLabels();
                    this.showNotice('Every task is annotated.');
                }
                else {
                    this.renderLabels();
                }
            }
            catch (error) {
                // roll the optimistic label state back to the last committed one
                if (this.task && this.task.task.task_id === taskId) {
                    this.pendingLabels = new Set(this.config.mode === 'multi' ? (previous?.labels ?? []) : []);
                    this.renderLabels();
                }
                this.showBanner(`Commit failed: ${describe(error)}`, () => this.commitLabels(labels));
            }
        });
        this.commitChain = run;
        return run;
    }
    commitPending() {
        return this.commitLabels(this.labelsInConfigOrder(this.pendingLabels));
    }
    /** Resolves once every commit queued so far has settled. */
    async idle() {
        await this.commitChain;
    }
    labelsInConfigOrder(keys) {
        return this.config.labels.map((l) => l.key).filter((key) => keys.has(key));
    }
    effectiveEditedText(taskId) {
        const draft = this.drafts.get(taskId);
        if (draft && draft.editedDirty) {
            return draft.editedText === draft.seed ? null : draft.editedText;
        }
        return this.task?.own_annotation?.edited_text ?? null;
    }
    // -- keyboard ---------------------------------------------------------------
    handleKey(event) {
        const action = routeKey(event, this.shortcuts);
        if (action.kind === 'none')
            return;
        event.preventDefault();
        switch (action.kind) {
            case 'blur':
                if (event.target instanceof HTMLElement)
                    event.target.blur();
                break;
            case 'label':
                if (!this.task)
                    break;
                if (this.config.mode === 'single') {
                    this.pendingLabels = new Set([action.labelKey]);
                    this.renderLabels();
                    void this.commitLabels([action.labelKey]);
                }
                else {
                    this.toggleLabel(action.labelKey);
                }
                break;
            case 'commit':
                if (this.config.mode === 'multi' && this.task)
                    void this.commitPending();
                break;
            case 'next':
                void this.next();
                break;
            case 'previous':
                void this.previous();
                break;
            case 'first-unannotated':
                void this.jumpToUnannotated();
                break;
            case 'focus-edit':
                this.selectTab('edit');
                this.query('.edit-box')?.focus();
                break;
            case 'focus-comment':
                this.query('.comment-box')?.focus();
                break;
            case 'toggle-reference':
                this.referenceVisible = !this.referenceVisible;
                this.query('.shortcut-reference')?.classList.toggle('hidden', !this.referenceVisible);
                break;
        }
    }
    toggleLabel(labelKey) {
        if (this.pendingLabels.has(labelKey)) {
            this.pendingLabels.delete(labelKey);
        }
        else {
            this.pendingLabels.add(labelKey);
        }
        this.renderLabels();
    }
    // -- rendering --------------------------------------------------------------
    query(selector) {
        return this.root.querySelector(selector);
    }
    renderShell() {
        const labelOrder = this.config.labels.map((l) => l.key);
        const sidebar = el('aside', { class: 'sidebar' });
        sidebar.append(el('h1', {}, 'tagpag'), el('div', { class: 'annotator' }, `annotating as ${this.annotatorId}`), el('div', { class: 'progress' }), el('nav', { class: 'nav-buttons' }, this.actionButton('previous', '◀ prev', 'p'), this.actionButton('next', 'next ▶', 'n'), this.actionButton('first-unannotated', 'first unannotated', 'u')), el('div', { class: 'labels', role: 'group' }, ...this.config.labels.map((label, index) => {
            const button = el('button', { class: 'label-button', 'data-label-key': label.key }, el('span', { class: `swatch ${labelColorClass(label.key, labelOrder)}` }), ` ${label.name} `, el('kbd', {}, label.shortcut));
            button.addEventListener('click', () => {
                if (this.config.mode === 'single') {
                    this.pendingLabels = new Set([label.key]);
                    this.renderLabels();
                    void this.commitLabels([label.key]);
                }
                else {
                    this.toggleLabel(label.key);
                }
            });
            return button;
        })));
        if (this.config.mode === 'multi') {
            const commit = el('button', { class: 'commit-button' }, 'commit ', el('kbd', {}, 'Enter'));
            commit.addEventListener('click', () => void this.commitPending());
            sidebar.append(commit);
        }
        const comment = el('textarea', { class: 'comment-box', rows: '3' });
        comment.addEventListener('input', () => {
            const draft = this.drafts.get(this.currentTaskId);
            if (draft)
                draft.comment = comment.value;
        });
        sidebar.append(el('label', { class: 'comment-field' }, el('span', {}, 'Comment '), comment), el('div', { class: 'links' }), this.actionButton('toggle-reference', 'shortcut reference', '?'), this.buildReference());
        const main = el('main', { class: 'main' });
        main.append(el('div', { class: 'banner hidden' }, el('span', { class: 'banner-text' }), (() => {
            const retry = el('button', { class: 'banner-retry' }, 'retry');
            retry.addEventListener('click', () => {
                const action = this.bannerRetry;
                this.hideBanner();
                action?.();
            });
            return retry;
        })()), el('div', { class: 'url-bar' }), el('div', { class: 'tabs', role: 'tablist' }, ...['cleaned', 'raw', 'url', 'edit'].map((tab) => {
            const button = el('button', { role: 'tab', 'data-tab': tab, 'aria-selected': 'false' }, tab === 'url' ? 'URL' : tab[0].toUpperCase() + tab.slice(1));
            button.addEventListener('click', () => this.selectTab(tab));
            return button;
        })), el('div', { class: 'notice hidden' }), el('section', { class: 'pane pane-cleaned' }, el('pre', { class: 'text-view' })), el('section', { class: 'pane pane-raw' }, el('pre', { class: 'text-view' })), el('section', { class: 'pane pane-url' }), (() => {
            const editBox = el('textarea', { class: 'edit-box', rows: '18' });
            editBox.addEventListener('input', () => {
                const draft = this.drafts.get(this.currentTaskId);
                if (draft) {
                    draft.editedText = editBox.value;
                    draft.editedDirty = true;
                }
            });
            const reset = el('button', { class: 'edit-reset' }, 'Reset to extracted text');
            reset.addEventListener('click', () => {
                const draft = this.drafts.get(this.currentTaskId);
                if (draft) {
                    draft.editedText = draft.seed;
                    draft.editedDirty = true;
                    editBox.value = draft.seed;
                }
            });
            return el('section', { class: 'pane pane-edit' }, editBox, reset);
        })());
        this.root.replaceChildren(el('div', { class: 'app' }, sidebar, main));
        this.renderProgress();
    }
    actionButton(action, text, key) {
        const button = el('button', { class: 'nav-button', 'data-action': action }, `${text} `, el('kbd', {}, key));
        button.addEventListener('click', () => {
            switch (action) {
                case 'next':
                    void this.next();
                    break;
                case 'previous':
                    void this.previous();
                    break;
                case 'first-unannotated':
                    void this.jumpToUnannotated();
                    break;
                case 'toggle-reference':
                    this.referenceVisible = !this.referenceVisible;
                    this.query('.shortcut-reference')?.classList.toggle('hidden', !this.referenceVisible);
                    break;
            }
        });
        return button;
    }
    buildReference() {
        const rows = [
            ...this.config.labels.map((label) => [
                label.shortcut,
                this.config.mode === 'single' ? `label "${label.name}" and advance` : `toggle "${label.name}"`,
            ]),
            ['Enter', 'commit selected labels (multi mode)'],
            ['n', 'next task'],
            ['p', 'previous task'],
            ['u', 'first unannotated task'],
            ['e', 'edit extracted text'],
            ['c', 'focus the comment box'],
            ['?', 'toggle this reference'],
            ['Esc', 'leave a text field'],
        ];
        const list = el('dl', { class: 'shortcut-reference hidden' });
        for (const [key, what] of rows) {
            list.append(el('dt', {}, el('kbd', {}, key)), el('dd', {}, what));
        }
        return list;
    }
    renderProgress() {
        const box = this.query('.progress');
        if (!box)
            return;
        const counts = this.session.counts;
        box.replaceChildren(el('div', { class: 'position' }, `Task ${this.position + 1} of ${this.total}`), el('div', { class: 'annotated' }, `${counts.annotated} of ${counts.total} annotated`));
    }
    renderLabels() {
        const committed = new Set(this.task?.own_annotation?.labels ?? []);
        const active = this.config.mode === 'multi' ? this.pendingLabels : committed;
        for (const button of this.root.querySelectorAll('.label-button')) {
            const key = button.dataset.labelKey ?? '';
            button.classList.toggle('active', active.has(key) || (this.config.mode === 'single' && this.pendingLabels.has(key)));
            button.classList.toggle('committed', committed.has(key));
        }
    }
    selectTab(tab) {
        if (this.task?.html_missing && tab !== 'url')
            return;
        this.activeTab = tab;
        for (const button of this.root.querySelectorAll('[role="tab"]')) {
            button.setAttribute('aria-selected', button.dataset.tab === tab ? 'true' : 'false');
        }
        for (const pane of this.root.querySelectorAll('.pane')) {
            pane.classList.toggle('hidden', !pane.classList.contains(`pane-${tab}`));
        }
    }
    renderTask() {
        const task = this.task;
        if (!task)
            return;
        this.renderProgress();
        this.renderUrlBar();
        this.renderLabels();
        this.hideNotice();
        const cleaned = this.query('.pane-cleaned .text-view');
        if (cleaned)
            cleaned.textContent = task.extraction.clean_text;
        const raw = this.query('.pane-raw .text-view');
        if (raw)
            raw.textContent = task.extraction.raw_text;
        this.renderUrlPane();
        const draft = this.drafts.get(task.task.task_id);
        const editBox = this.query('.edit-box');
        if (editBox && draft)
            editBox.value = draft.editedText;
        const comment = this.query('.comment-box');
        if (comment && draft)
            comment.value = draft.comment;
        for (const button of this.root.querySelectorAll('[role="tab"]')) {
            const tab = button.dataset.tab;
            button.disabled = task.html_missing && tab !== 'url';
        }
        this.selectTab(this.activeTab);
        if (task.html_missing) {
            this.showNotice('No stored HTML for this task; only the URL view is available.');
        }
        else if (!task.extraction.clean_text) {
            this.showNotice('No main content was extracted; showing the raw text.');
        }
        this.renderLinks();
    }
    renderUrlBar() {
        const bar = this.query('.url-bar');
        const task = this.task;
        if (!bar || !task)
            return;
        const labelOrder = this.config.labels.map((l) => l.key);
        const analysis = task.url_analysis;
        bar.replaceChildren();
        for (const segment of segmentByByteSpans(analysis.original, analysis.highlights)) {
            if (segment.labelKey === null) {
                bar.append(segment.text);
            }
            else {
                bar.append(el('mark', {
                    class: labelColorClass(segment.labelKey, labelOrder),
                    'data-label-key': segment.labelKey,
                    title: `${segment.keyword} (${segment.labelKey})`,
                }, segment.text));
            }
        }
    }
    renderUrlPane() {
        const pane = this.query('.pane-url');
        const task = this.task;
        if (!pane || !task)
            return;
        const analysis = task.url_analysis;
        pane.replaceChildren();
        if (analysis.malformed || analysis.parts === null) {
            pane.append(el('p', { class: 'url-malformed' }, 'This URL could not be parsed; shown as-is:'), el('code', {}, analysis.original));
            return;
        }
        const parts = analysis.parts;
        const partRows = [
            ['scheme', parts.scheme],
            ['host', parts.host],
            ['port', parts.port === null ? '(default)' : String(parts.port)],
            ['path', parts.path_segments.length ? parts.path_segments.join(' / ') : '(none)'],
            ['query', parts.query_pairs.length ? parts.query_pairs.map(([k, v]) => `${k}=${v}`).join('  ') : '(none)'],
            ['fragment', parts.fragment ?? '(none)'],
        ];
        const dl = el('dl', { class: 'url-parts' });
        for (const [name, value] of partRows) {
            dl.append(el('dt', {}, name), el('dd', {}, value));
        }
        const table = el('table', { class: 'url-tokens' });
        table.append(el('tr', {}, el('th', {}, 'token'), el('th', {}, 'component'), el('th', {}, 'bytes')), ...analysis.tokens.map((token) => el('tr', {}, el('td', {}, el('code', {}, token.token)), el('td', {}, token.component), el('td', {}, `${token.start}..${token.end}`))));
        pane.append(dl, table);
    }
    renderLinks() {
        const box = this.query('.links');
        const task = this.task;
        if (!box || !task)
            return;
        box.replaceChildren(el('a', {
            class: 'link-scraped',
            href: scrapedHtmlUrl(task.task.task_id),
            target: '_blank',
            rel: 'noopener',
        }, 'scraped HTML'), el('a', { class: 'link-live', href: task.task.url, target: '_blank', rel: 'noopener' }, 'live page'), el('span', { class: 'wayback' }, el('span', { class: 'wayback-state' }, 'archive: checking…')), el('a', { class: 'link-export', href: exportUrl(this.annotatorId), download: '' }, 'download my annotations'));
    }
    async refreshWayback(taskId, force) {
        const slot = this.query('.wayback');
        if (!slot)
            return;
        let result = this.waybackCache.get(taskId);
        if (!result || force) {
            try {
                result = await this.api.getWayback(taskId);
            }
            catch {
                result = { status: 'lookup_failed', snapshot_url: null, snapshot_timestamp: null };
            }
            if (result.status !== 'lookup_failed')
                this.waybackCache.set(taskId, result);
        }
        if (!this.task || this.task.task.task_id !== taskId)
            return;
        slot.replaceChildren();
        if (result.status === 'archived' && result.snapshot_url) {
            slot.append(el('a', {
                class: 'link-wayback',
                href: result.snapshot_url,
                target: '_blank',
                rel: 'noopener',
                title: result.snapshot_timestamp ?? '',
            }, 'archived snapshot'));
        }
        else if (result.status === 'not_archived') {
            slot.append(el('span', { class: 'wayback-none' }, 'no archived snapshot'));
        }
        else {
            const retry = el('button', { class: 'wayback-retry' }, 'archive lookup failed, retry');
            retry.addEventListener('click', () => void this.refreshWayback(taskId, true));
            slot.append(retry);
        }
    }
    showBanner(message, retry) {
        this.bannerRetry = retry;
        const banner = this.query('.banner');
        const text = this.query('.banner-text');
        if (text)
            text.textContent = message;
        banner?.classList.remove('hidden');
    }
    hideBanner() {
        this.bannerRetry = null;
        this.query('.banner')?.classList.add('hidden');
    }
    showNotice(message) {
        const notice = this.query('.notice');
        if (!notice)
            return;
        notice.textContent = message;
        notice.classList.remove('hidden');
    }
    hideNotice() {
        this.query('.notice')?.classList.add('hidden');
    }
}
function describe(error) {
    return error instanceof Error ? error.message : String(error);
}
export { isTextField };
