/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_spacetime_free: (a: number, b: number) => void;
export const apply_operator: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const density_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number, number];
export const spacetime_advance: (a: number, b: number, c: number) => [number, number];
export const spacetime_density: (a: number) => number;
export const spacetime_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
export const spacetime_time: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
