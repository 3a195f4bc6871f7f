/**
 * Keyboard routing: one keydown becomes one declarative action.
 *
 * Label shortcuts come from the server config; the navigation keys are the
 * fixed reserved set, so the two can never collide (the server rejects such
 * configs at load). While a text field has focus every shortcut is inert
 * except Escape, which blurs the field and hands the keyboard back.
 */
const NONE = { kind: 'none' };
export function isTextField(target) {
    return (target instanceof HTMLInputElement ||
        target instanceof HTMLTextAreaElement ||
        (target instanceof HTMLElement && target.isContentEditable));
}
export function routeKey(event, shortcutToLabel) {
    if (event.ctrlKey || event.metaKey || event.altKey) {
        return NONE;
    }
    if (isTextField(event.target)) {
        return event.key === 'Escape' ? { kind: 'blur' } : NONE;
    }
    if (event.key === 'Enter') {
        return { kind: 'commit' };
    }
    const key = event.key.length === 1 ? event.key.toLowerCase() : event.key;
    const labelKey = shortcutToLabel.get(key);
    if (labelKey !== undefined) {
        return { kind: 'label', labelKey };
    }
    switch (key) {
        case 'n':
            return { kind: 'next' };
        case 'p':
            return { kind: 'previous' };
        case 'u':
            return { kind: 'first-unannotated' };
        case 'e':
            return { kind: 'focus-edit' };
        case 'c':
            return { kind: 'focus-comment' };
        case '?':
            return { kind: 'toggle-reference' };
        default:
            return NONE;
    }
}
export function shortcutMap(labels) {
    const map = new Map();
    for (const label of labels) {
        map.set(label.shortcut.toLowerCase(), label.key);
    }
    return map;
}
