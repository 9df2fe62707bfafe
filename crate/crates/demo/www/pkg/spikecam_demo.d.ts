/* tslint:disable */
/* eslint-disable */

/**
 * Which noise sources to switch on.
 */
export class Toggles {
    free(): void;
    [Symbol.dispose](): void;
    constructor(shot: boolean, thermal: boolean, fixed_pattern: boolean, dark_scale: number, seed: number);
    /**
     * Multiplies the default dark current.
     */
    dark_scale: number;
    fixed_pattern: boolean;
    seed: number;
    shot: boolean;
    thermal: boolean;
}

/**
 * Inter-spike-interval histograms for a uniform gray scene over 2000
 * frames: `[ideal_1..=max, noisy_1..=max]`, `2 * max_interval` counts.
 */
export function isi_histograms(gray: number, max_interval: number, toggles: Toggles): Uint32Array;

/**
 * Reconstructions from spike counts in a `window` around the middle frame.
 *
 * Returns `SIZE*SIZE` ideal intensities, then `SIZE*SIZE` noisy ones, then
 * the PSNR of noisy against ideal in dB (infinite when identical).
 */
export function reconstruct(kind: number, window: number, gain: number, toggles: Toggles): Float64Array;

/**
 * Spike frames as grayscale bytes (0 or 255), frame-major, `SIZE*SIZE`
 * per frame.
 */
export function spike_frames(kind: number, frames: number, gain: number, noisy: boolean, toggles: Toggles): Uint8Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_toggles_dark_scale: (a: number) => number;
    readonly __wbg_get_toggles_fixed_pattern: (a: number) => number;
    readonly __wbg_get_toggles_seed: (a: number) => number;
    readonly __wbg_get_toggles_shot: (a: number) => number;
    readonly __wbg_get_toggles_thermal: (a: number) => number;
    readonly __wbg_set_toggles_dark_scale: (a: number, b: number) => void;
    readonly __wbg_set_toggles_fixed_pattern: (a: number, b: number) => void;
    readonly __wbg_set_toggles_seed: (a: number, b: number) => void;
    readonly __wbg_set_toggles_shot: (a: number, b: number) => void;
    readonly __wbg_set_toggles_thermal: (a: number, b: number) => void;
    readonly __wbg_toggles_free: (a: number, b: number) => void;
    readonly isi_histograms: (a: number, b: number, c: number) => [number, number];
    readonly reconstruct: (a: number, b: number, c: number, d: number) => [number, number];
    readonly spike_frames: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly toggles_new: (a: number, b: number, c: number, d: number, e: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
