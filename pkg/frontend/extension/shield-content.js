"use strict";(()=>{function f(){return typeof window>"u"?{}:window}var m="__attributeShieldInstalled",a={hardwareConcurrency:4,deviceMemory:8,languages:["en-US"],permissionState:"prompt",storageQuota:2147483648,storageUsage:0,webglRenderer:"shielded",powerPreference:"default",canvasDataUrl:"data:image/png;base64,shielded",navigatorKeys:["userAgent","language","languages","platform","cookieEnabled","doNotTrack","maxTouchPoints","hardwareConcurrency","deviceMemory","permissions","storage","mediaDevices","bluetooth","mediaCapabilities","plugins","mimeTypes","pdfViewerEnabled"]};function t(r,n,e){try{Object.defineProperty(r,n,{value:e,configurable:!0,enumerable:!0})}catch{try{r[n]=e}catch{}}}function d(r,n){return r[n]?r[n]:(t(r,n,{}),r[n]??{})}function w(){return Object.assign({RENDERER:7937,FRAGMENT_SHADER:35632,HIGH_INT:36341,getParameter:e=>0,getSupportedExtensions:()=>[],getExtension:e=>null,getContextAttributes:()=>({powerPreference:a.powerPreference}),getShaderPrecisionFormat:()=>({rangeMin:0,rangeMax:0,precision:0})},{})}function p(r){let n=r;if(n[m])return;n[m]=!0;let e=n.navigator;e||(t(n,"navigator",{}),e=n.navigator??{}),t(e,"hardwareConcurrency",a.hardwareConcurrency),t(e,"deviceMemory",a.deviceMemory),t(e,"languages",Object.freeze([...a.languages])),t(e,"language",a.languages[0]),t(d(e,"mediaDevices"),"enumerateDevices",async()=>[]),t(d(e,"permissions"),"query",async s=>({state:a.permissionState})),t(d(e,"storage"),"estimate",async()=>({quota:a.storageQuota,usage:a.storageUsage})),t(d(e,"bluetooth"),"getAvailability",async()=>!1);let i=n.document;if(i){i.fonts&&t(i.fonts,"check",c=>!1);let s=i.createElement?.bind(i);s&&t(i,"createElement",(c,...u)=>{let o=s(c,...u);if(String(c).toLowerCase()==="canvas"){t(o,"toDataURL",()=>a.canvasDataUrl);let l=o.getContext?.bind(o);t(o,"getContext",(g,...y)=>g==="webgl"||g==="experimental-webgl"||g==="webgl2"?w():l?l(g,...y):null)}return o})}try{let s=a.navigatorKeys.filter(u=>u in e),c=new Proxy(e,{ownKeys:()=>s.slice(),getOwnPropertyDescriptor:(u,o)=>{if(typeof o=="string"&&s.includes(o))return{configurable:!0,enumerable:!0,value:u[o]}},getPrototypeOf:()=>Object.prototype});Object.defineProperty(n,"navigator",{value:c,configurable:!0})}catch{}}p(f());})();
