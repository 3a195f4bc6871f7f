/**
 * Thin typed client for the annotation server's JSON endpoints.
 */
export class ApiError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
async function request(input, init) {
    const response = await fetch(input, init);
    if (!response.ok) {
        let code = 'http_error';
        let message = `${response.status} for ${input}`;
        try {
            const body = (await response.json());
            if (body.error)
                code = body.error;
            if (body.message)
                message = body.message;
        }
        catch {
            // non-JSON error body; keep the generic message
        }
        throw new ApiError(response.status, code, message);
    }
    return (await response.json());
}
export function createApiClient(base = '') {
    const q = (value) => encodeURIComponent(value);
    return {
        getConfig: () => request(`${base}/api/config`),
        getSession: (annotator) => request(`${base}/api/session?annotator=${q(annotator)}`),
        getTask: (taskId, annotator) => request(`${base}/api/tasks/${q(taskId)}?annotator=${q(annotator)}`),
        putAnnotation: (taskId, annotator, body) => request(`${base}/api/tasks/${q(taskId)}/annotation?annotator=${q(annotator)}`, {
            method: 'PUT',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(body),
        }),
        getWayback: (taskId) => request(`${base}/api/wayback?task_id=${q(taskId)}`),
    };
}
export function scrapedHtmlUrl(taskId, base = '') {
    return `${base}/api/tasks/${encodeURIComponent(taskId)}/html`;
}
export function exportUrl(scope, base = '') {
    return `${base}/api/export.csv?scope=${encodeURIComponent(scope)}`;
}
