/* @ts-self-types="./spikecam_demo.d.ts" */

/**
 * Which noise sources to switch on.
 */
export class Toggles {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        TogglesFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_toggles_free(ptr, 0);
    }
    /**
     * Multiplies the default dark current.
     * @returns {number}
     */
    get dark_scale() {
        const ret = wasm.__wbg_get_toggles_dark_scale(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {boolean}
     */
    get fixed_pattern() {
        const ret = wasm.__wbg_get_toggles_fixed_pattern(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get seed() {
        const ret = wasm.__wbg_get_toggles_seed(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {boolean}
     */
    get shot() {
        const ret = wasm.__wbg_get_toggles_shot(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {boolean}
     */
    get thermal() {
        const ret = wasm.__wbg_get_toggles_thermal(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * Multiplies the default dark current.
     * @param {number} arg0
     */
    set dark_scale(arg0) {
        wasm.__wbg_set_toggles_dark_scale(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set fixed_pattern(arg0) {
        wasm.__wbg_set_toggles_fixed_pattern(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set seed(arg0) {
        wasm.__wbg_set_toggles_seed(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set shot(arg0) {
        wasm.__wbg_set_toggles_shot(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set thermal(arg0) {
        wasm.__wbg_set_toggles_thermal(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} shot
     * @param {boolean} thermal
     * @param {boolean} fixed_pattern
     * @param {number} dark_scale
     * @param {number} seed
     */
    constructor(shot, thermal, fixed_pattern, dark_scale, seed) {
        const ret = wasm.toggles_new(shot, thermal, fixed_pattern, dark_scale, seed);
        this.__wbg_ptr = ret;
        TogglesFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
}
if (Symbol.dispose) Toggles.prototype[Symbol.dispose] = Toggles.prototype.free;

/**
 * Inter-spike-interval histograms for a uniform gray scene over 2000
 * frames: `[ideal_1..=max, noisy_1..=max]`, `2 * max_interval` counts.
 * @param {number} gray
 * @param {number} max_interval
 * @param {Toggles} toggles
 * @returns {Uint32Array}
 */
export function isi_histograms(gray, max_interval, toggles) {
    _assertClass(toggles, Toggles);
    const ret = wasm.isi_histograms(gray, max_interval, toggles.__wbg_ptr);
    var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
    return v1;
}

/**
 * Reconstructions from spike counts in a `window` around the middle frame.
 *
 * Returns `SIZE*SIZE` ideal intensities, then `SIZE*SIZE` noisy ones, then
 * the PSNR of noisy against ideal in dB (infinite when identical).
 * @param {number} kind
 * @param {number} window
 * @param {number} gain
 * @param {Toggles} toggles
 * @returns {Float64Array}
 */
export function reconstruct(kind, window, gain, toggles) {
    _assertClass(toggles, Toggles);
    const ret = wasm.reconstruct(kind, window, gain, toggles.__wbg_ptr);
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * Spike frames as grayscale bytes (0 or 255), frame-major, `SIZE*SIZE`
 * per frame.
 * @param {number} kind
 * @param {number} frames
 * @param {number} gain
 * @param {boolean} noisy
 * @param {Toggles} toggles
 * @returns {Uint8Array}
 */
export function spike_frames(kind, frames, gain, noisy, toggles) {
    _assertClass(toggles, Toggles);
    const ret = wasm.spike_frames(kind, frames, gain, noisy, toggles.__wbg_ptr);
    var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
    return v1;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./spikecam_demo_bg.js": import0,
    };
}

const TogglesFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_toggles_free(ptr, 1));

function _assertClass(instance, klass) {
    if (!(instance instanceof klass)) {
        throw new Error(`expected instance of ${klass.name}`);
    }
}

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

function getArrayU32FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint32ArrayMemory0().subarray(ptr / 4, ptr / 4 + len);
}

function getArrayU8FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint8ArrayMemory0().subarray(ptr / 1, ptr / 1 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint32ArrayMemory0 = null;
function getUint32ArrayMemory0() {
    if (cachedUint32ArrayMemory0 === null || cachedUint32ArrayMemory0.byteLength === 0) {
        cachedUint32ArrayMemory0 = new Uint32Array(wasm.memory.buffer);
    }
    return cachedUint32ArrayMemory0;
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint32ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('spikecam_demo_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
