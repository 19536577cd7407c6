/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const greedy_report: (a: number, b: number) => [number, number];
export const mu_report: (a: number, b: number) => [number, number];
export const psi_curve: (a: number, b: number, c: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
