/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_toggles_dark_scale: (a: number) => number;
export const __wbg_get_toggles_fixed_pattern: (a: number) => number;
export const __wbg_get_toggles_seed: (a: number) => number;
export const __wbg_get_toggles_shot: (a: number) => number;
export const __wbg_get_toggles_thermal: (a: number) => number;
export const __wbg_set_toggles_dark_scale: (a: number, b: number) => void;
export const __wbg_set_toggles_fixed_pattern: (a: number, b: number) => void;
export const __wbg_set_toggles_seed: (a: number, b: number) => void;
export const __wbg_set_toggles_shot: (a: number, b: number) => void;
export const __wbg_set_toggles_thermal: (a: number, b: number) => void;
export const __wbg_toggles_free: (a: number, b: number) => void;
export const isi_histograms: (a: number, b: number, c: number) => [number, number];
export const reconstruct: (a: number, b: number, c: number, d: number) => [number, number];
export const spike_frames: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const toggles_new: (a: number, b: number, c: number, d: number, e: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
