/** Typed client for the service endpoints.
 *
 * Every failure surfaces as an ApiError: server-reported ones carry the
 * body's code/message/httpStatus verbatim, transport failures get code
 * "network" with httpStatus 0. The base path is relative so the app works
 * wherever the service mounts it.
 */
export class ApiError extends Error {
    constructor(code, message, httpStatus) {
        super(message);
        this.name = "ApiError";
        this.code = code;
        this.httpStatus = httpStatus;
    }
}
function pngPart(bytes) {
    // the copy guarantees a plain ArrayBuffer-backed view, which Blob requires
    return new Blob([new Uint8Array(bytes)], { type: "image/png" });
}
async function errorFrom(res) {
    try {
        const body = await res.json();
        if (body && typeof body.code === "string" && typeof body.message === "string") {
            return new ApiError(body.code, body.message, res.status);
        }
    }
    catch {
        // fall through: body was not the documented error shape
    }
    return new ApiError("internal", `unexpected response (HTTP ${res.status})`, res.status);
}
export function createApiClient(fetchFn, base = "") {
    const doFetch = fetchFn ?? ((url, init) => fetch(url, init));
    async function request(url, init) {
        let res;
        try {
            res = await doFetch(base + url, init);
        }
        catch (err) {
            throw new ApiError("network", `cannot reach the service: ${String(err)}`, 0);
        }
        if (!res.ok)
            throw await errorFrom(res);
        return (await res.json());
    }
    return {
        async search(params) {
            const form = new FormData();
            form.append("image", pngPart(params.image), "query.png");
            if (params.mask)
                form.append("mask", pngPart(params.mask), "mask.png");
            if (params.k !== undefined)
                form.append("k", String(params.k));
            if (params.engine !== undefined)
                form.append("engine", params.engine);
            return request("/api/v1/search", { method: "POST", body: form });
        },
        async restore(params) {
            const form = new FormData();
            form.append("image", pngPart(params.image), "query.png");
            form.append("mask", pngPart(params.mask), "mask.png");
            if (params.engine !== undefined)
                form.append("engine", params.engine);
            return request("/api/v1/restore", { method: "POST", body: form });
        },
        async registerProduct(params) {
            const form = new FormData();
            form.append("image", pngPart(params.image), "product.png");
            form.append("name", params.name);
            form.append("category", params.category);
            return request("/api/v1/products", { method: "POST", body: form });
        },
        async getCategories() {
            return request("/api/v1/categories");
        },
        async getProduct(id) {
            return request(`/api/v1/products/${encodeURIComponent(id)}`);
        },
        productImageUrl(id) {
            return `${base}/api/v1/products/${encodeURIComponent(id)}/image`;
        },
    };
}
