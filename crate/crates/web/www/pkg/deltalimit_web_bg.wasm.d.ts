/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const kernel_slice: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const limit_label: (a: number, b: number) => [number, number, number, number];
export const psi_profiles: (a: number, b: number, c: number) => [number, number, number, number];
export const resonance_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const resonances: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
